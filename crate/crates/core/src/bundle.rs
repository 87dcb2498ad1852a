//! Fiber operator families `s ↦ M(s)` sampled on a grid, with their base and
//! extrapolation norms.
//!
//! Each fiber is `ℂ^d`. The base norm is the Euclidean norm; the extrapolation
//! norm at node `s` is `‖x‖₋₁,ₛ = ‖M(s)⁻¹x‖`. Fibers are always bounded in
//! finite dimension, so unboundedness of a family shows up only as growth of
//! `‖M(s)‖` in `s` on truncated domains.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::numerics::{checked_inverse, log_norm, mat_exp, op_norm, Lu, Matrix, Vector, C64, DEFAULT_CONDITION_CAP};
use crate::random;
use crate::report::{CheckRecord, Threshold, VerificationReport};

/// Real scalar profile `s ↦ m(s)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `Σ c_k s^k`
    Polynomial { coeffs: Vec<f64> },
    /// `mean + amplitude · cos(2π s / period)`
    Cosine { mean: f64, amplitude: f64, period: f64 },
}

impl Profile {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            Profile::Cosine { mean, amplitude, period } => {
                mean + amplitude * (2.0 * std::f64::consts::PI * s / period).cos()
            }
        }
    }
}

/// How the fiber operators are produced.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    /// `M(s) ≡ A`
    Constant(Matrix),
    /// `d = 1`, `M(s) = m(s)`
    ScalarProfile(Profile),
    /// `M(s) = Σ s^k C_k`
    MatrixProfile(Vec<Matrix>),
    /// One matrix per grid node.
    Tabulated(Vec<Matrix>),
}

impl FamilySpec {
    pub fn dim(&self) -> Result<usize> {
        let first = match self {
            FamilySpec::Constant(m) => return Ok(m.dim()),
            FamilySpec::ScalarProfile(_) => return Ok(1),
            FamilySpec::MatrixProfile(ms) | FamilySpec::Tabulated(ms) => ms.first(),
        };
        first
            .map(Matrix::dim)
            .ok_or_else(|| Error::InvalidArgument("family has no matrices".into()))
    }

    /// Evaluates the family at a coordinate. Tabulated families have no
    /// meaning off their grid and are rejected.
    pub fn at(&self, s: f64) -> Result<Matrix> {
        match self {
            FamilySpec::Constant(m) => Ok(m.clone()),
            FamilySpec::ScalarProfile(p) => Ok(Matrix::scalar(C64::new(p.eval(s), 0.0))),
            FamilySpec::MatrixProfile(coeffs) => {
                let d = self.dim()?;
                let mut acc = Matrix::zeros(d);
                for c in coeffs.iter().rev() {
                    if c.dim() != d {
                        return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
                    }
                    acc = &acc.scale_real(s) + c;
                }
                Ok(acc)
            }
            FamilySpec::Tabulated(_) => Err(Error::InvalidArgument(
                "a tabulated family can only be sampled on its own grid".into(),
            )),
        }
    }

    /// Samples the family at every node of `grid`.
    pub fn sample(&self, grid: &GridMeasure) -> Result<Vec<Matrix>> {
        let d = self.dim()?;
        let mats = match self {
            FamilySpec::Tabulated(ms) => {
                if ms.len() != grid.len() {
                    return Err(Error::DimensionMismatch { expected: grid.len(), found: ms.len() });
                }
                ms.clone()
            }
            _ => grid.nodes().iter().map(|&s| self.at(s)).collect::<Result<_>>()?,
        };
        for m in &mats {
            if m.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
            }
            if !m.is_finite() {
                return Err(Error::InvalidArgument("fiber operator has non-finite entries".into()));
            }
        }
        Ok(mats)
    }

    /// Loads a tabulated family from CSV: `node`, then row-major `(re, im)` pairs.
    pub fn load_tabulated_csv(path: &Path, grid: &GridMeasure) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut mats = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("row {i}: {e}")))?;
            let entries = vals.len().saturating_sub(1);
            let d = ((entries / 2) as f64).sqrt().round() as usize;
            if d == 0 || 2 * d * d != entries {
                return Err(Error::InvalidArgument(format!(
                    "row {i}: {entries} entries is not 2·d² for any d"
                )));
            }
            let expected_node = grid.nodes().get(i).copied().ok_or(Error::IndexOutOfRange {
                index: i,
                len: grid.len(),
            })?;
            if (vals[0] - expected_node).abs() > 1e-12 * expected_node.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "row {i}: node {} does not match grid node {expected_node}",
                    vals[0]
                )));
            }
            let data = vals[1..].chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            mats.push(Matrix::from_row_major(d, data)?);
        }
        Ok(FamilySpec::Tabulated(mats))
    }
}

/// Writes fiber matrices in the tabulated CSV layout.
pub fn write_tabulated_csv<W: std::io::Write>(out: W, grid: &GridMeasure, matrices: &[Matrix]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = matrices.first().map(Matrix::dim).unwrap_or(1);
    let mut header = vec!["node".to_string()];
    for i in 0..d {
        for j in 0..d {
            header.push(format!("m{i}{j}_re"));
            header.push(format!("m{i}{j}_im"));
        }
    }
    w.write_record(&header)?;
    for (s, m) in grid.nodes().iter().zip(matrices) {
        let mut row = vec![format!("{s:e}")];
        for z in m.as_slice() {
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Uniform semigroup type `‖exp(tM(s))‖ ≤ M e^{ωt}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityType {
    pub m: f64,
    pub omega: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Base,
    Extrapolation,
}

#[derive(Clone, Debug)]
pub struct BundleOptions {
    /// Claimed type; when absent, `(1, max_s μ₂(M(s)))` is used.
    pub stability: Option<StabilityType>,
    pub condition_cap: f64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self { stability: None, condition_cap: DEFAULT_CONDITION_CAP }
    }
}

/// A validated family of invertible fiber operators with cached inverses.
#[derive(Clone, Debug)]
pub struct FiberBundle {
    grid: Arc<GridMeasure>,
    dim: usize,
    operators: Vec<Matrix>,
    inverses: Vec<Matrix>,
    conditions: Vec<f64>,
    stability: StabilityType,
    condition_cap: f64,
}

pub fn build_bundle(spec: &FamilySpec, grid: Arc<GridMeasure>) -> Result<FiberBundle> {
    build_bundle_with(spec, grid, &BundleOptions::default())
}

pub fn build_bundle_with(spec: &FamilySpec, grid: Arc<GridMeasure>, opts: &BundleOptions) -> Result<FiberBundle> {
    let operators = spec.sample(&grid)?;
    FiberBundle::from_operators(grid, operators, opts)
}

impl FiberBundle {
    pub fn from_operators(grid: Arc<GridMeasure>, operators: Vec<Matrix>, opts: &BundleOptions) -> Result<Self> {
        if operators.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: operators.len() });
        }
        let dim = operators.first().map(Matrix::dim).unwrap_or(1);
        let mut inverses = Vec::with_capacity(operators.len());
        let mut conditions = Vec::with_capacity(operators.len());
        for (node, m) in operators.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            let s = grid.nodes()[node];
            let (inv, cond) = checked_inverse(m, opts.condition_cap).map_err(|e| match e {
                Error::Singular { condition, .. } => Error::NonInvertibleFiber { node, s, condition },
                other => other,
            })?;
            let defect = (&(m * &inv) - &Matrix::identity(dim)).norm_frobenius();
            if defect > 1e-10 {
                return Err(Error::NonInvertibleFiber { node, s, condition: cond });
            }
            inverses.push(inv);
            conditions.push(cond);
        }
        let stability = match opts.stability {
            Some(st) => st,
            None => {
                let mut omega = f64::NEG_INFINITY;
                for m in &operators {
                    omega = omega.max(log_norm(m)?);
                }
                StabilityType { m: 1.0, omega }
            }
        };
        Ok(Self { grid, dim, operators, inverses, conditions, stability, condition_cap: opts.condition_cap })
    }

    pub fn grid(&self) -> &Arc<GridMeasure> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn stability(&self) -> StabilityType {
        self.stability
    }

    pub fn condition_cap(&self) -> f64 {
        self.condition_cap
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    pub fn conditions(&self) -> &[f64] {
        &self.conditions
    }

    /// `M(s)` at a node.
    pub fn eval_fiber_operator(&self, node: usize) -> Result<&Matrix> {
        self.operators.get(node).ok_or(Error::IndexOutOfRange { index: node, len: self.len() })
    }

    /// Cached `M(s)⁻¹` at a node.
    pub fn inverse(&self, node: usize) -> Result<&Matrix> {
        self.inverses.get(node).ok_or(Error::IndexOutOfRange { index: node, len: self.len() })
    }

    /// `‖M(s)⁻¹x‖₂`
    pub fn extrap_norm(&self, node: usize, x: &Vector) -> Result<f64> {
        let inv = self.inverse(node)?;
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        Ok(inv.apply(x).norm())
    }

    /// Fiber norm at a node in the requested mode.
    pub fn fiber_norm(&self, node: usize, x: &Vector, mode: NormMode) -> Result<f64> {
        match mode {
            NormMode::Base => Ok(x.norm()),
            NormMode::Extrapolation => self.extrap_norm(node, x),
        }
    }

    /// `max_s ‖M(s)⁻¹‖₂`
    pub fn max_inverse_norm(&self) -> Result<f64> {
        self.inverses.iter().try_fold(0.0f64, |acc, inv| Ok(acc.max(op_norm(inv)?)))
    }
}

/// Dyadic `ℚ + iℚ` lattice of level `k` spanned by the standard basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeSet {
    pub dim: usize,
    pub level: u32,
}

impl LatticeSet {
    pub const DEFAULT_LEVEL: u32 = 20;

    pub fn new(dim: usize, level: u32) -> Self {
        Self { dim, level }
    }

    pub fn spacing(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    /// `e_k` and `i e_k` for every basis index.
    pub fn generators(&self) -> Vec<Vector> {
        (0..self.dim)
            .flat_map(|k| {
                let e = Vector::basis(self.dim, k);
                let ie = e.scale(C64::new(0.0, 1.0));
                [e, ie]
            })
            .collect()
    }

    /// Nearest lattice element, per real/imaginary component, ties to even.
    pub fn snap(&self, v: &Vector) -> Vector {
        let scale = 2f64.powi(self.level as i32);
        v.map(|z| C64::new((z.re * scale).round_ties_even() / scale, (z.im * scale).round_ties_even() / scale))
    }

    pub fn contains(&self, v: &Vector) -> bool {
        let scale = 2f64.powi(self.level as i32);
        v.as_slice()
            .iter()
            .all(|z| (z.re * scale).fract() == 0.0 && (z.im * scale).fract() == 0.0)
    }
}

const VALIDATION_SUITE: &str = "bundle-validation";

/// Diagnostic report for a family that may fail to build: per-node conditioning only.
pub fn validate_family(spec: &FamilySpec, grid: &GridMeasure, cap: f64) -> VerificationReport {
    let mut report = VerificationReport::new(serde_json::Value::Null);
    match spec.sample(grid) {
        Ok(mats) => {
            for (node, m) in mats.iter().enumerate() {
                let cond = Lu::factor(m).condition();
                report.push(
                    CheckRecord::new(
                        VALIDATION_SUITE,
                        format!("invertibility@{node}"),
                        "0 in the resolvent set of M(s)",
                        cond,
                        Threshold::AtMost { value: cap },
                    )
                    .with_detail(format!("s = {}", grid.nodes()[node])),
                );
            }
        }
        Err(e) => report.push(CheckRecord::failure(VALIDATION_SUITE, "sample", "family evaluation", &e)),
    }
    report
}

/// Conditioning, norm axioms, norm equivalence, the finite-evaluation
/// measurability surrogate and the claimed stability type of a built bundle.
pub fn validate_bundle(bundle: &FiberBundle, seed: u64, samples: usize) -> VerificationReport {
    let suite = VALIDATION_SUITE;
    let mut report = VerificationReport::new(serde_json::Value::Null);
    let grid = bundle.grid();
    for (node, &cond) in bundle.conditions().iter().enumerate() {
        report.push(
            CheckRecord::new(
                suite,
                format!("invertibility@{node}"),
                "0 in the resolvent set of M(s)",
                cond,
                Threshold::AtMost { value: bundle.condition_cap() },
            )
            .with_detail(format!("s = {}", grid.nodes()[node])),
        );
    }

    let mut rng = random::substream(seed, suite);
    let d = bundle.dim();
    let n = bundle.len();
    let mut min_positive = f64::INFINITY;
    let mut homogeneity = 0.0f64;
    let mut triangle = f64::NEG_INFINITY;
    let mut equivalence = f64::NEG_INFINITY;
    let mut norm_bounds = Vec::with_capacity(n);
    for node in 0..n {
        let m = &bundle.operators[node];
        let inv = &bundle.inverses[node];
        match (op_norm(m), op_norm(inv)) {
            (Ok(a), Ok(b)) => norm_bounds.push((a, b)),
            (Err(e), _) | (_, Err(e)) => {
                report.push(CheckRecord::failure(suite, format!("op-norm@{node}"), "induced 2-norm", &e));
                return report;
            }
        }
    }
    for _ in 0..samples {
        let node = (random::uniform(&mut rng, 0.0, 1.0) * n as f64) as usize % n;
        let x = random::vector(&mut rng, d, 1.0);
        let y = random::vector(&mut rng, d, 1.0);
        let alpha = random::complex(&mut rng, 3.0);
        let nx = bundle.extrap_norm(node, &x).unwrap_or(f64::NAN);
        let ny = bundle.extrap_norm(node, &y).unwrap_or(f64::NAN);
        let nxy = bundle.extrap_norm(node, &(&x + &y)).unwrap_or(f64::NAN);
        let nax = bundle.extrap_norm(node, &x.scale(alpha)).unwrap_or(f64::NAN);
        min_positive = min_positive.min(nx);
        homogeneity = homogeneity.max((nax - alpha.norm() * nx).abs() / (alpha.norm() * nx));
        triangle = triangle.max((nxy - nx - ny) / (nx + ny));
        let (m_norm, inv_norm) = norm_bounds[node];
        let base = x.norm();
        let lower = base / m_norm - nx;
        let upper = nx - inv_norm * base;
        equivalence = equivalence.max(lower.max(upper) / base);
    }
    if samples > 0 {
        report.push(CheckRecord::flag(suite, "positivity", "N_s = {0}", min_positive > 0.0));
        report.push(CheckRecord::new(
            suite,
            "homogeneity",
            "‖αx‖₋₁,ₛ = |α| ‖x‖₋₁,ₛ",
            homogeneity,
            Threshold::AtMost { value: 1e-12 },
        ));
        report.push(CheckRecord::new(
            suite,
            "triangle-inequality",
            "‖x+y‖₋₁,ₛ ≤ ‖x‖₋₁,ₛ + ‖y‖₋₁,ₛ",
            triangle,
            Threshold::AtMost { value: 1e-12 },
        ));
        report.push(CheckRecord::new(
            suite,
            "norm-equivalence",
            "‖x‖/‖M(s)‖ ≤ ‖x‖₋₁,ₛ ≤ ‖M(s)⁻¹‖ ‖x‖",
            equivalence,
            Threshold::AtMost { value: 1e-10 },
        ));
    }

    let lattice = LatticeSet::new(d, LatticeSet::DEFAULT_LEVEL);
    let measurable = lattice.generators().iter().all(|b| {
        (0..n).all(|node| bundle.extrap_norm(node, b).map(f64::is_finite).unwrap_or(false))
    });
    report.push(CheckRecord::flag(
        suite,
        "measurability",
        "s ↦ ‖M(s)⁻¹b‖ finite for lattice generators",
        measurable,
    ));

    let st = bundle.stability();
    let mut worst = f64::NEG_INFINITY;
    for &t in &[0.25, 0.5, 1.0, 2.0] {
        for m in bundle.operators() {
            let ratio = mat_exp(m, t)
                .and_then(|e| op_norm(&e))
                .map(|nrm| nrm / (st.m * (st.omega * t).exp()))
                .unwrap_or(f64::INFINITY);
            worst = worst.max(ratio);
        }
    }
    report.push(CheckRecord::new(
        suite,
        "stability-type",
        "‖exp(tM(s))‖ ≤ M e^{ωt}",
        worst,
        Threshold::AtMost { value: 1.0 + 1e-9 },
    ));
    report
}
