//! Extrapolation spaces of multiplication operators.
//!
//! The extrapolation fiber over `s` is `ℂ^d` normed by `‖M(s)⁻¹·‖`; no
//! completion is needed in finite dimension. `𝓜₋₁` acts by `M(s)` on all of
//! the base space, and the identification of the extrapolated `L^p` space with
//! the `L^p` space of extrapolated fibers is made constructive by carrying a
//! witness `g` with `f = 𝓜₋₁ g`.

use std::sync::Arc;

use crate::bundle::{build_bundle, FamilySpec, FiberBundle, NormMode};
use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::numerics::{Lu, Matrix, DEFAULT_CONDITION_CAP};
use crate::random::{self, Rng};
use crate::semigroup::MultSemigroup;
use crate::space::{lp_fiber_norm, FiberFunction};

/// An extrapolation-mode function, optionally with `g` such that `f = 𝓜₋₁ g`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapolatedFunction {
    pub value: FiberFunction,
    pub witness: Option<FiberFunction>,
}

impl ExtrapolatedFunction {
    /// Wraps an extrapolation-mode function without a witness.
    pub fn without_witness(value: FiberFunction) -> Result<Self> {
        if value.mode() != NormMode::Extrapolation {
            return Err(Error::InvalidArgument("expected an extrapolation-mode function".into()));
        }
        Ok(Self { value, witness: None })
    }

    /// Largest pointwise defect `‖M(s)g(s) − f(s)‖` and the relative norm gap
    /// between `‖f‖₋₁` and `‖g‖`; `None` without a witness.
    pub fn witness_defects(&self, bundle: &FiberBundle) -> Result<Option<(f64, f64)>> {
        let Some(g) = &self.witness else { return Ok(None) };
        let mut pointwise = 0.0f64;
        for (i, (fv, gv)) in self.value.values().iter().zip(g.values()).enumerate() {
            let mg = bundle.eval_fiber_operator(i)?.apply(gv);
            pointwise = pointwise.max((&mg - fv).norm() / fv.norm().max(f64::MIN_POSITIVE));
        }
        let nf = lp_fiber_norm(&self.value, Some(bundle))?;
        let ng = lp_fiber_norm(g, None)?;
        Ok(Some((pointwise, relative_gap(nf, ng))))
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `f(s) = M(s) g(s)` tagged extrapolation mode, with `g` as witness. Total on
/// base-mode inputs.
pub fn extrapolated_apply(bundle: &FiberBundle, g: &FiberFunction) -> Result<ExtrapolatedFunction> {
    if g.mode() != NormMode::Base {
        return Err(Error::InvalidArgument("extrapolated_apply takes a base-mode function".into()));
    }
    if g.dim() != bundle.dim() {
        return Err(Error::DimensionMismatch { expected: bundle.dim(), found: g.dim() });
    }
    if **g.grid() != **bundle.grid() {
        return Err(Error::GridMismatch);
    }
    let f = g.map_nodes(|i, v| Ok(bundle.eval_fiber_operator(i)?.apply(v)))?;
    Ok(ExtrapolatedFunction { value: f.with_mode(NormMode::Extrapolation), witness: Some(g.clone()) })
}

/// `(𝒮(t)f)(s) = exp(tM(s)) f(s)` in extrapolation mode; the witness moves to `𝒯(t)g`.
pub fn extrapolated_semigroup_apply(
    bundle: &Arc<FiberBundle>,
    t: f64,
    f: &ExtrapolatedFunction,
) -> Result<ExtrapolatedFunction> {
    let sg = MultSemigroup::new(bundle.clone(), None)?;
    let props = sg.propagators(t)?;
    let value = f.value.map_nodes(|i, v| Ok(props[i].apply(v)))?;
    let witness = match &f.witness {
        Some(g) => Some(g.map_nodes(|i, v| Ok(props[i].apply(v)))?),
        None => None,
    };
    Ok(ExtrapolatedFunction { value, witness })
}

/// Outcome of identifying an extrapolation-mode function with its preimage.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentificationReport {
    /// `|‖f‖₋₁ − ‖g‖| / max(‖f‖₋₁, ‖g‖)`
    pub isometry_defect: f64,
    /// `‖𝓜₋₁g − f‖₋₁ / ‖f‖₋₁`
    pub reconstruction_defect: f64,
    /// Nodes whose condition estimate exceeds the bundle cap.
    pub ill_conditioned_nodes: Vec<usize>,
}

impl IdentificationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.ill_conditioned_nodes.is_empty() && self.isometry_defect <= tol && self.reconstruction_defect <= tol
    }
}

/// `g(s) = M(s)⁻¹ f(s)` per node, with the isometry and reconstruction defects.
pub fn identify_extrapolation(bundle: &FiberBundle, f: &FiberFunction) -> Result<(FiberFunction, IdentificationReport)> {
    if f.mode() != NormMode::Extrapolation {
        return Err(Error::InvalidArgument("identify_extrapolation takes an extrapolation-mode function".into()));
    }
    if f.dim() != bundle.dim() {
        return Err(Error::DimensionMismatch { expected: bundle.dim(), found: f.dim() });
    }
    let ill_conditioned_nodes: Vec<usize> = bundle
        .conditions()
        .iter()
        .enumerate()
        .filter(|(_, &c)| !(c <= bundle.condition_cap()))
        .map(|(i, _)| i)
        .collect();
    let g = f.map_nodes(|i, v| Ok(bundle.inverse(i)?.apply(v)))?.with_mode(NormMode::Base);

    let nf = lp_fiber_norm(f, Some(bundle))?;
    let ng = lp_fiber_norm(&g, None)?;
    let rebuilt = extrapolated_apply(bundle, &g)?.value;
    let recon = lp_fiber_norm(&rebuilt.sub(f)?, Some(bundle))?;
    let report = IdentificationReport {
        isometry_defect: relative_gap(nf, ng),
        reconstruction_defect: if nf == 0.0 { recon } else { recon / nf },
        ill_conditioned_nodes,
    };
    Ok((g, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorollaryReport {
    pub samples: usize,
    /// Largest relative gap between the two norms over all samples.
    pub max_defect: f64,
}

/// For the constant bundle `M(s) ≡ A`, compares the extrapolation-mode norm
/// of sampled `f` with the base-mode norm of `s ↦ A⁻¹f(s)`, where `A⁻¹f(s)`
/// comes from an LU solve rather than the bundle's stored inverse.
pub fn constant_fiber_corollary_check(
    a: &Matrix,
    grid: Arc<GridMeasure>,
    sample_count: usize,
    p: f64,
    rng: &mut Rng,
) -> Result<CorollaryReport> {
    let lu = Lu::factor(a);
    if lu.is_singular() || !(lu.condition() <= DEFAULT_CONDITION_CAP) {
        return Err(Error::Singular { condition: lu.condition(), cap: DEFAULT_CONDITION_CAP });
    }
    let bundle = build_bundle(&FamilySpec::Constant(a.clone()), grid.clone())?;
    let d = a.dim();
    let mut max_defect = 0.0f64;
    for _ in 0..sample_count {
        let values = (0..grid.len()).map(|_| random::vector(rng, d, 1.0)).collect();
        let f = FiberFunction::new(grid.clone(), values, NormMode::Extrapolation, p)?;
        let ext = lp_fiber_norm(&f, Some(&bundle))?;
        let pulled = f.map_nodes(|_, v| Ok(lu.solve(v)))?.with_mode(NormMode::Base);
        let base = lp_fiber_norm(&pulled, None)?;
        max_defect = max_defect.max(relative_gap(ext, base));
    }
    Ok(CorollaryReport { samples: sample_count, max_defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Profile;
    use crate::numerics::{solve_linear, Vector, C64};

    fn unit_grid(n: usize) -> Arc<GridMeasure> {
        Arc::new(GridMeasure::uniform_interval(0.0, 1.0, n).unwrap())
    }

    fn scalar_bundle(n: usize) -> Arc<FiberBundle> {
        let spec = FamilySpec::ScalarProfile(Profile::Polynomial { coeffs: vec![-1.0, -1.0] });
        Arc::new(build_bundle(&spec, unit_grid(n)).unwrap())
    }

    fn random_bundle(rng: &mut Rng, d: usize, n: usize) -> Arc<FiberBundle> {
        let c0 = random::stable_matrix(rng, d);
        let c1 = random::matrix(rng, d, 0.2);
        Arc::new(build_bundle(&FamilySpec::MatrixProfile(vec![c0, c1]), unit_grid(n)).unwrap())
    }

    fn random_function(rng: &mut Rng, grid: &Arc<GridMeasure>, d: usize, p: f64) -> FiberFunction {
        let values = (0..grid.len()).map(|_| random::vector(rng, d, 1.0)).collect();
        FiberFunction::new(grid.clone(), values, NormMode::Base, p).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let b = scalar_bundle(9);
        let g = FiberFunction::zeros(b.grid().clone(), 1, 2.0).unwrap();
        let f = extrapolated_apply(&b, &g).unwrap();
        assert_eq!(lp_fiber_norm(&f.value, Some(&b)).unwrap(), 0.0);
        let (back, rep) = identify_extrapolation(&b, &f.value).unwrap();
        assert_eq!(lp_fiber_norm(&back, None).unwrap(), 0.0);
        assert!(rep.passes(0.0));
    }

    #[test]
    fn scalar_profile_isometry() {
        let b = scalar_bundle(33);
        let g = FiberFunction::constant(b.grid().clone(), Vector::from_real(&[1.0]), 2.0).unwrap();
        let f = extrapolated_apply(&b, &g).unwrap();
        for (s, v) in b.grid().nodes().iter().zip(f.value.values()) {
            assert_eq!(v[0].re, -(1.0 + s));
        }
        assert!((lp_fiber_norm(&f.value, Some(&b)).unwrap() - 1.0).abs() < 1e-15);
        let (back, rep) = identify_extrapolation(&b, &f.value).unwrap();
        assert!(back.values().iter().all(|v| (v[0].re - 1.0).abs() < 1e-15));
        assert!(rep.passes(1e-15), "{rep:?}");
    }

    #[test]
    fn random_isometry_and_round_trip() {
        let mut rng = random::seeded(21);
        for _ in 0..20 {
            let b = random_bundle(&mut rng, 4, 64);
            let g = random_function(&mut rng, b.grid(), 4, 2.0);
            let f = extrapolated_apply(&b, &g).unwrap();
            let (pointwise, gap) = f.witness_defects(&b).unwrap().unwrap();
            assert!(pointwise < 1e-14 && gap <= 1e-10, "{pointwise} {gap}");
            let (back, rep) = identify_extrapolation(&b, &f.value).unwrap();
            assert!(rep.passes(1e-10), "{rep:?}");
            let rel = lp_fiber_norm(&back.sub(&g).unwrap(), None).unwrap() / lp_fiber_norm(&g, None).unwrap();
            assert!(rel <= 1e-10);
        }
    }

    #[test]
    fn identification_matches_per_node_solve() {
        let mut rng = random::seeded(22);
        let b = random_bundle(&mut rng, 3, 17);
        let f = random_function(&mut rng, b.grid(), 3, 1.0).with_mode(NormMode::Extrapolation);
        let (g, _) = identify_extrapolation(&b, &f).unwrap();
        for (i, (fv, gv)) in f.values().iter().zip(g.values()).enumerate() {
            let solved = solve_linear(b.eval_fiber_operator(i).unwrap(), fv).unwrap();
            assert!((&solved - gv).norm() <= 1e-12 * solved.norm());
        }
    }

    #[test]
    fn extrapolated_semigroup_cases() {
        let b = Arc::new(build_bundle(&FamilySpec::Constant(Matrix::real_diag(&[-1.0])), unit_grid(9)).unwrap());
        let g = FiberFunction::from_fn(b.grid().clone(), 2.0, |s| Vector::from_real(&[s + 1.0])).unwrap();
        let f = extrapolated_apply(&b, &g).unwrap();
        assert_eq!(extrapolated_semigroup_apply(&b, 0.0, &f).unwrap(), f);
        let t = 0.7;
        let moved = extrapolated_semigroup_apply(&b, t, &f).unwrap();
        let ratio = lp_fiber_norm(&moved.value, Some(&b)).unwrap() / lp_fiber_norm(&f.value, Some(&b)).unwrap();
        assert!((ratio - (-t).exp()).abs() < 1e-15);
    }

    #[test]
    fn extrapolated_semigroup_commutes_with_extrapolated_operator() {
        let mut rng = random::seeded(23);
        let b = random_bundle(&mut rng, 3, 33);
        let g = random_function(&mut rng, b.grid(), 3, 2.0);
        let t = 0.8;
        let lhs = extrapolated_semigroup_apply(&b, t, &extrapolated_apply(&b, &g).unwrap()).unwrap();
        let tg = MultSemigroup::new(b.clone(), None).unwrap().apply(t, &g).unwrap();
        let rhs = extrapolated_apply(&b, &tg).unwrap();
        for (x, y) in lhs.value.values().iter().zip(rhs.value.values()) {
            assert!((x - y).norm() <= 1e-11 * y.norm().max(1.0));
        }
        assert_eq!(lhs.witness.unwrap(), tg);
    }

    #[test]
    fn corollary_scalar_and_triangular() {
        let mut rng = random::seeded(3);
        let rep = constant_fiber_corollary_check(&Matrix::real_diag(&[-1.0]), unit_grid(17), 10, 2.0, &mut rng).unwrap();
        assert!(rep.max_defect <= 1e-12);

        let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);
        let grid = unit_grid(11);
        let b = build_bundle(&FamilySpec::Constant(a.clone()), grid.clone()).unwrap();
        let f = FiberFunction::constant(grid, Vector::from_real(&[0.0, 1.0]), 2.0).unwrap();
        let ext = lp_fiber_norm(&f.with_mode(NormMode::Extrapolation), Some(&b)).unwrap();
        assert!((ext - 0.5f64.sqrt()).abs() < 1e-15);
        let rep = constant_fiber_corollary_check(&a, unit_grid(11), 50, 2.0, &mut rng).unwrap();
        assert!(rep.max_defect <= 1e-12, "{rep:?}");
    }

    #[test]
    fn mode_preconditions() {
        let b = scalar_bundle(5);
        let g = FiberFunction::constant(b.grid().clone(), Vector::new(vec![C64::new(1.0, 1.0)]), 2.0).unwrap();
        assert!(identify_extrapolation(&b, &g).is_err());
        assert!(extrapolated_apply(&b, &g.with_mode(NormMode::Extrapolation)).is_err());
        assert!(ExtrapolatedFunction::without_witness(g).is_err());
    }
}
