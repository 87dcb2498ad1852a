//! Discrete `L^p` fiber spaces over a weighted grid.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::bundle::{FiberBundle, LatticeSet, NormMode};
use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::numerics::{Vector, C64};

/// Node values `f(s) ∈ ℂ^d` together with the fiber norm they are measured in.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberFunction {
    grid: Arc<GridMeasure>,
    values: Vec<Vector>,
    mode: NormMode,
    p: f64,
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 ≤ p < ∞")))
    }
}

fn same_grid(a: &Arc<GridMeasure>, b: &Arc<GridMeasure>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FiberFunction {
    pub fn new(grid: Arc<GridMeasure>, values: Vec<Vector>, mode: NormMode, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        let d = values.first().map(Vector::dim).unwrap_or(1);
        for v in &values {
            if v.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument("fiber function values must be finite".into()));
            }
        }
        Ok(Self { grid, values, mode, p })
    }

    /// Samples `f` at every node, base mode.
    pub fn from_fn(grid: Arc<GridMeasure>, p: f64, f: impl Fn(f64) -> Vector) -> Result<Self> {
        let values = grid.nodes().iter().map(|&s| f(s)).collect();
        Self::new(grid, values, NormMode::Base, p)
    }

    pub fn constant(grid: Arc<GridMeasure>, value: Vector, p: f64) -> Result<Self> {
        let values = vec![value; grid.len()];
        Self::new(grid, values, NormMode::Base, p)
    }

    pub fn zeros(grid: Arc<GridMeasure>, dim: usize, p: f64) -> Result<Self> {
        Self::constant(grid, Vector::zeros(dim), p)
    }

    pub fn grid(&self) -> &Arc<GridMeasure> {
        &self.grid
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    pub fn value(&self, node: usize) -> &Vector {
        &self.values[node]
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.values.first().map(Vector::dim).unwrap_or(1)
    }

    /// Same values, reinterpreted in another norm mode.
    pub fn with_mode(&self, mode: NormMode) -> Self {
        Self { mode, ..self.clone() }
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self { p, ..self.clone() })
    }

    /// New function on the same grid and mode with values computed per node.
    pub fn map_nodes(&self, f: impl Fn(usize, &Vector) -> Result<Vector>) -> Result<Self> {
        let values = self.values.iter().enumerate().map(|(i, v)| f(i, v)).collect::<Result<Vec<_>>>()?;
        Self::new(self.grid.clone(), values, self.mode, self.p)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.map_nodes(|i, v| Ok(v + &other.values[i]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.map_nodes(|i, v| Ok(v - &other.values[i]))
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { values: self.values.iter().map(|v| v.scale(alpha)).collect(), ..self.clone() }
    }

    /// `1_E · f` for a node subset `E` given as a mask.
    pub fn restrict(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: mask.len() });
        }
        let d = self.dim();
        self.map_nodes(|i, v| Ok(if mask[i] { v.clone() } else { Vector::zeros(d) }))
    }

    /// Hex SHA-256 over the grid nodes, weights, mode, exponent and values.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for &s in self.grid.nodes() {
            h.update(s.to_le_bytes());
        }
        for &w in self.grid.weights() {
            h.update(w.to_le_bytes());
        }
        h.update([matches!(self.mode, NormMode::Extrapolation) as u8]);
        h.update(self.p.to_le_bytes());
        for v in &self.values {
            for z in v.as_slice() {
                h.update(z.re.to_le_bytes());
                h.update(z.im.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    /// Per-node fiber norms in this function's mode.
    pub fn pointwise_norms(&self, bundle: Option<&FiberBundle>) -> Result<Vec<f64>> {
        match self.mode {
            NormMode::Base => Ok(self.values.iter().map(Vector::norm).collect()),
            NormMode::Extrapolation => {
                let bundle = bundle.ok_or_else(|| {
                    Error::InvalidArgument("extrapolation-mode norms need a fiber bundle".into())
                })?;
                if !same_grid(&self.grid, bundle.grid()) {
                    return Err(Error::GridMismatch);
                }
                self.values.iter().enumerate().map(|(i, v)| bundle.extrap_norm(i, v)).collect()
            }
        }
    }

    /// Writes `node, re0, im0, re1, im1, …` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["node".to_string()];
        for k in 0..self.dim() {
            header.push(format!("re{k}"));
            header.push(format!("im{k}"));
        }
        w.write_record(&header)?;
        for (s, v) in self.grid.nodes().iter().zip(&self.values) {
            let mut row = vec![format!("{s:e}")];
            for z in v.as_slice() {
                row.push(format!("{:e}", z.re));
                row.push(format!("{:e}", z.im));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`FiberFunction::write_csv`]; node columns must match `grid`.
    pub fn read_csv<R: Read>(input: R, grid: Arc<GridMeasure>, mode: NormMode, p: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut values = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {i}: {e}")))?;
            if nums.len() < 3 || nums.len().is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "row {i}: expected node followed by (re, im) pairs"
                )));
            }
            let node = *grid.nodes().get(i).ok_or(Error::IndexOutOfRange { index: i, len: grid.len() })?;
            if (nums[0] - node).abs() > 1e-12 * node.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "row {i}: node {} does not match grid node {node}",
                    nums[0]
                )));
            }
            values.push(Vector::new(nums[1..].chunks(2).map(|c| C64::new(c[0], c[1])).collect()));
        }
        Self::new(grid, values, mode, p)
    }
}

/// `(∫_Ω ‖f(s)‖_s^p dμ(s))^{1/p}` by the grid quadrature.
pub fn lp_fiber_norm(f: &FiberFunction, bundle: Option<&FiberBundle>) -> Result<f64> {
    let norms = f.pointwise_norms(bundle)?;
    Ok(weighted_lp(&norms, f.grid.weights(), f.p))
}

/// Scaled `(Σ wᵢ nᵢ^p)^{1/p}`; summation order is node order.
pub(crate) fn weighted_lp(norms: &[f64], weights: &[f64], p: f64) -> f64 {
    let peak = norms
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&n, _)| n)
        .fold(0.0, f64::max);
    if peak == 0.0 || !peak.is_finite() {
        return peak;
    }
    let sum: f64 = norms.iter().zip(weights).map(|(&n, &w)| w * (n / peak).powf(p)).sum();
    peak * sum.powf(1.0 / p)
}

/// Piecewise-constant function with lattice values on disjoint node sets.
#[derive(Clone, Debug, PartialEq)]
pub struct SimpleFunction {
    /// `(Ω_i, b_i)`, ordered by the first node of each part.
    pub parts: Vec<(Vec<usize>, Vector)>,
    pub lattice: LatticeSet,
}

impl SimpleFunction {
    pub fn node_count(&self) -> usize {
        self.parts.iter().map(|(idx, _)| idx.len()).sum()
    }

    /// Expands back to node values on `grid`.
    pub fn to_fiber_function(&self, grid: Arc<GridMeasure>, mode: NormMode, p: f64) -> Result<FiberFunction> {
        let mut values = vec![Vector::zeros(self.lattice.dim); grid.len()];
        for (idx, b) in &self.parts {
            for &i in idx {
                let slot = values.get_mut(i).ok_or(Error::IndexOutOfRange { index: i, len: grid.len() })?;
                *slot = b.clone();
            }
        }
        FiberFunction::new(grid, values, mode, p)
    }
}

/// Snaps every node value to the level-`k` dyadic lattice and groups equal
/// values into parts. Returns the approximant and the largest per-node fiber
/// norm of the difference.
pub fn simple_approximation(
    f: &FiberFunction,
    level: u32,
    bundle: Option<&FiberBundle>,
) -> Result<(SimpleFunction, f64)> {
    let lattice = LatticeSet::new(f.dim(), level);
    let snapped: Vec<Vector> = f.values.iter().map(|v| lattice.snap(v)).collect();

    let mut index: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
    let mut parts: Vec<(Vec<usize>, Vector)> = Vec::new();
    for (i, v) in snapped.iter().enumerate() {
        let key: Vec<(u64, u64)> = v.as_slice().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
        match index.get(&key) {
            Some(&part) => parts[part].0.push(i),
            None => {
                index.insert(key, parts.len());
                parts.push((vec![i], v.clone()));
            }
        }
    }

    let diff = FiberFunction { values: snapped, ..f.clone() }.sub(f)?;
    let error = diff.pointwise_norms(bundle)?.into_iter().fold(0.0, f64::max);
    Ok((SimpleFunction { parts, lattice }, error))
}

/// `√d · 2^{-k} · (1 + max_s ‖M(s)⁻¹‖)`, the a priori bound on the snap error.
pub fn simple_approximation_bound(dim: usize, level: u32, bundle: Option<&FiberBundle>) -> Result<f64> {
    let inv = match bundle {
        Some(b) => b.max_inverse_norm()?,
        None => 0.0,
    };
    Ok((dim as f64).sqrt() * 2f64.powi(-(level as i32)) * (1.0 + inv))
}

/// True iff `f` and `g` differ by at most `tol` in fiber norm at every node of
/// positive weight.
pub fn almost_everywhere_equal(
    f: &FiberFunction,
    g: &FiberFunction,
    tol: f64,
    bundle: Option<&FiberBundle>,
) -> Result<bool> {
    let diff = f.sub(g)?;
    let norms = diff.pointwise_norms(bundle)?;
    Ok(norms.iter().zip(f.grid.weights()).all(|(&n, &w)| w == 0.0 || n <= tol))
}
