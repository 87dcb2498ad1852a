//! Quadrature weights for the grids standing in for `(Ω, μ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the parameter domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Interval { a: f64, b: f64 },
    Circle { length: f64 },
}

impl Topology {
    /// Total measure `μ(Ω)`.
    pub fn measure(&self) -> f64 {
        match *self {
            Topology::Interval { a, b } => b - a,
            Topology::Circle { length } => length,
        }
    }
}

/// Composite trapezoid weights on intervals, uniform `L/N` weights on circles.
pub fn quadrature_weights(topology: &Topology, nodes: &[f64]) -> Result<Vec<f64>> {
    if nodes.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidGrid("non-finite node".into()));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
    }
    match *topology {
        Topology::Interval { a, b } => {
            if nodes.len() < 2 {
                return Err(Error::InvalidGrid("an interval grid needs at least 2 nodes".into()));
            }
            if !(b > a) || nodes[0] != a || nodes[nodes.len() - 1] != b {
                return Err(Error::InvalidGrid(format!(
                    "interval nodes must run from a = {a} to b = {b}"
                )));
            }
            let n = nodes.len();
            let mut w = vec![0.0; n];
            for (i, pair) in nodes.windows(2).enumerate() {
                let half = 0.5 * (pair[1] - pair[0]);
                w[i] += half;
                w[i + 1] += half;
            }
            Ok(w)
        }
        Topology::Circle { length } => {
            if nodes.is_empty() {
                return Err(Error::InvalidGrid("a circle grid needs at least 1 node".into()));
            }
            if !(length > 0.0) || nodes[0] < 0.0 || nodes[nodes.len() - 1] >= length {
                return Err(Error::InvalidGrid(format!("circle nodes must lie in [0, {length})")));
            }
            let n = nodes.len() as f64;
            Ok(vec![length / n; nodes.len()])
        }
    }
}
