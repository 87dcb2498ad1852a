//! Weighted grids standing in for the measure space `(Ω, Σ, μ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{quadrature_weights, Topology};

/// Nodes plus quadrature weights over an interval or a circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    topology: Topology,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GridMeasure {
    /// `n` equally spaced nodes from `a` to `b` inclusive.
    pub fn uniform_interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid("an interval grid needs at least 2 nodes".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
        nodes[n - 1] = b;
        Self::tabulated(Topology::Interval { a, b }, nodes)
    }

    /// `n` equally spaced nodes `i L / n` on a circle of length `L`.
    pub fn circle(length: f64, n: usize) -> Result<Self> {
        let nodes = (0..n).map(|i| i as f64 * length / n as f64).collect();
        Self::tabulated(Topology::Circle { length }, nodes)
    }

    /// Arbitrary (strictly increasing) nodes with trapezoid or uniform weights.
    pub fn tabulated(topology: Topology, nodes: Vec<f64>) -> Result<Self> {
        let weights = quadrature_weights(&topology, &nodes)?;
        Ok(Self { topology, nodes, weights })
    }

    /// Nodes with explicit weights. Zero weights mark null-set nodes.
    pub fn with_weights(topology: Topology, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        // Reuse the node checks.
        quadrature_weights(&topology, &nodes)?;
        if weights.len() != nodes.len() {
            return Err(Error::InvalidGrid(format!(
                "{} weights for {} nodes",
                weights.len(),
                nodes.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidGrid("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        let measure = topology.measure();
        if (total - measure).abs() > 1e-12 * measure.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "weights sum to {total}, expected the total measure {measure}"
            )));
        }
        Ok(Self { topology, nodes, weights })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.topology.measure()
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.topology, Topology::Circle { .. })
    }

    /// Node spacing of a circle grid.
    pub fn circle_spacing(&self) -> Option<f64> {
        match self.topology {
            Topology::Circle { length } => Some(length / self.nodes.len() as f64),
            Topology::Interval { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_measure() {
        let g = GridMeasure::uniform_interval(-1.0, 3.0, 17).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 4.0).abs() < 1e-14);
        let c = GridMeasure::circle(2.5, 10).unwrap();
        assert!((c.weights().iter().sum::<f64>() - 2.5).abs() < 1e-14);
        assert_eq!(c.circle_spacing(), Some(0.25));
    }

    #[test]
    fn explicit_weights_validated() {
        let top = Topology::Interval { a: 0.0, b: 1.0 };
        let nodes = vec![0.0, 0.5, 1.0];
        assert!(GridMeasure::with_weights(top, nodes.clone(), vec![0.5, 0.0, 0.5]).is_ok());
        assert!(GridMeasure::with_weights(top, nodes.clone(), vec![0.5, 0.0, 0.6]).is_err());
        assert!(GridMeasure::with_weights(top, nodes, vec![1.5, -0.5, 0.0]).is_err());
    }
}
