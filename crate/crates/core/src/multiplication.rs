//! Operator-valued multiplication operators `(𝓜f)(s) = M(s)f(s)` and their
//! resolvents.

use std::sync::Arc;

use crate::bundle::{FamilySpec, FiberBundle, NormMode};
use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::numerics::{Lu, Vector, C64};
use crate::space::{lp_fiber_norm, weighted_lp, FiberFunction};

#[derive(Clone, Debug)]
pub struct MultOperator {
    bundle: Arc<FiberBundle>,
    p: f64,
}

/// Outcome of probing `f ∈ dom(𝓜)` across truncations or refinements.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainVerdict {
    pub member: bool,
    /// `‖𝓜f‖_p` on each probe grid.
    pub norm_sequence: Vec<f64>,
    /// Log-log slope of the last two norms against the probe size.
    pub growth_exponent: f64,
}

/// Relative growth over the last refinement above which `‖𝓜f‖` counts as unbounded.
pub const DOMAIN_GROWTH_TOLERANCE: f64 = 0.05;

impl MultOperator {
    pub fn new(bundle: Arc<FiberBundle>, p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidArgument(format!("exponent p = {p} must satisfy 1 ≤ p < ∞")));
        }
        Ok(Self { bundle, p })
    }

    pub fn bundle(&self) -> &Arc<FiberBundle> {
        &self.bundle
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn check_input(&self, f: &FiberFunction) -> Result<()> {
        if !Arc::ptr_eq(f.grid(), self.bundle.grid()) && **f.grid() != **self.bundle.grid() {
            return Err(Error::GridMismatch);
        }
        if f.dim() != self.bundle.dim() {
            return Err(Error::DimensionMismatch { expected: self.bundle.dim(), found: f.dim() });
        }
        Ok(())
    }

    /// `g(s) = M(s) f(s)`, returned in base mode.
    pub fn apply(&self, f: &FiberFunction) -> Result<FiberFunction> {
        self.check_input(f)?;
        let g = f.map_nodes(|i, v| Ok(self.bundle.eval_fiber_operator(i)?.apply(v)))?;
        Ok(g.with_mode(NormMode::Base))
    }

    /// `g(s) = (λ − M(s))⁻¹ f(s)`. Nodes where `λ − M(s)` exceeds the
    /// condition cap raise a spectral error naming the node.
    pub fn resolvent_apply(&self, lambda: C64, f: &FiberFunction) -> Result<FiberFunction> {
        self.check_input(f)?;
        let cap = self.bundle.condition_cap();
        let nodes = self.bundle.grid().nodes();
        f.map_nodes(|i, v| {
            let shifted = self.bundle.eval_fiber_operator(i)?.scale_real(-1.0).shift(lambda);
            let lu = Lu::factor(&shifted);
            let condition = lu.condition();
            if !condition.is_finite() || condition > cap {
                return Err(Error::Spectral { node: i, s: nodes[i], lambda, condition });
            }
            Ok(lu.solve(v))
        })
    }

    /// `eₙ = ‖λₙ R(λₙ, 𝓜) f − f‖` for real `λₙ` above the bundle's growth bound.
    pub fn resolvent_approx_identity(&self, f: &FiberFunction, lambdas: &[f64]) -> Result<Vec<f64>> {
        let omega = self.bundle.stability().omega;
        lambdas
            .iter()
            .map(|&lambda| {
                if !(lambda > omega) {
                    return Err(Error::InvalidArgument(format!(
                        "lambda = {lambda} must exceed the growth bound ω = {omega}"
                    )));
                }
                let r = self.resolvent_apply(C64::new(lambda, 0.0), f)?;
                let diff = r.scale(C64::new(lambda, 0.0)).sub(f)?;
                lp_fiber_norm(&diff.with_mode(NormMode::Base), Some(&self.bundle))
            })
            .collect()
    }
}

/// Probes whether `s ↦ M(s)f(s)` stays `L^p`-bounded as the domain is
/// truncated at growing radii (or the mesh is refined).
///
/// `f` and the family are sampled afresh on each probe grid; the verdict is
/// "member" iff the norm grows by at most 5% between the last two probes.
pub fn domain_membership(
    family: &FamilySpec,
    f: impl Fn(f64) -> Vector,
    probes: &[GridMeasure],
    p: f64,
) -> Result<DomainVerdict> {
    if probes.len() < 2 {
        return Err(Error::InvalidArgument("domain probing needs at least two grids".into()));
    }
    let mut norm_sequence = Vec::with_capacity(probes.len());
    for grid in probes {
        let mats = family.sample(grid)?;
        let norms: Vec<f64> =
            grid.nodes().iter().zip(&mats).map(|(&s, m)| m.apply(&f(s)).norm()).collect();
        norm_sequence.push(weighted_lp(&norms, grid.weights(), p));
    }
    let n = norm_sequence.len();
    let (prev, last) = (norm_sequence[n - 2], norm_sequence[n - 1]);
    let member = last.is_finite() && (prev == 0.0 && last == 0.0 || last <= prev * (1.0 + DOMAIN_GROWTH_TOLERANCE));

    let (gp, gl) = (&probes[n - 2], &probes[n - 1]);
    let size_ratio = if (gl.measure() - gp.measure()).abs() > 1e-12 * gp.measure().abs().max(1.0) {
        gl.measure() / gp.measure()
    } else {
        gl.len() as f64 / gp.len() as f64
    };
    let growth_exponent = if prev > 0.0 && last > 0.0 && size_ratio != 1.0 {
        (last / prev).ln() / size_ratio.ln()
    } else {
        0.0
    };
    Ok(DomainVerdict { member, norm_sequence, growth_exponent })
}
