//! Verification suites. Each suite draws its random inputs from
//! `random::substream(seed, suite_name)` and returns its check records in a
//! fixed order, so a run is reproducible from the scenario alone.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng as _;

use crate::bundle::{
    build_bundle, build_bundle_with, validate_bundle, BundleOptions, FamilySpec, FiberBundle, NormMode, Profile,
};
use crate::error::Result;
use crate::evolution::{EvolutionFamily, EvolutionSemigroup, TimeFamily};
use crate::extrapolation::{
    constant_fiber_corollary_check, extrapolated_apply, extrapolated_semigroup_apply, identify_extrapolation,
    ExtrapolatedFunction,
};
use crate::grid::GridMeasure;
use crate::multiplication::{domain_membership, MultOperator};
use crate::numerics::{mat_exp, op_norm, Matrix, Vector, C64};
use crate::random::{self, Rng};
use crate::report::{convergence_table, CheckRecord, Threshold};
use crate::scenario::ScenarioContext;
use crate::semigroup::MultSemigroup;
use crate::space::{lp_fiber_norm, simple_approximation, simple_approximation_bound, FiberFunction};

/// Every suite name, sorted.
pub const ALL: &[&str] = &[
    "approximate-identity",
    "bundle-validation",
    "constant-fiber-corollary",
    "domain-membership",
    "evolution-family",
    "evolution-semigroup",
    "extrapolated-semigroup",
    "extrapolation-isometry",
    "fd-generator",
    "identification-roundtrip",
    "laplace-transform",
    "norm-axioms",
    "resolvent-identity",
    "semigroup-law",
    "simple-approximation",
];

/// Runs one suite. Numerical errors become failing records.
pub fn run(name: &str, ctx: &ScenarioContext) -> Vec<CheckRecord> {
    let mut s = Suite { name: name.to_string(), ctx, rng: random::substream(ctx.seed(), name), checks: Vec::new() };
    match name {
        "approximate-identity" => approximate_identity(&mut s),
        "bundle-validation" => {
            let report = validate_bundle(&ctx.bundle, ctx.seed(), 200);
            s.checks.extend(report.checks);
        }
        "constant-fiber-corollary" => constant_fiber_corollary(&mut s),
        "domain-membership" => domain(&mut s),
        "evolution-family" => evolution_family(&mut s),
        "evolution-semigroup" => evolution_semigroup(&mut s),
        "extrapolated-semigroup" => extrapolated_semigroup(&mut s),
        "extrapolation-isometry" => extrapolation_isometry(&mut s),
        "fd-generator" => fd_generator(&mut s),
        "identification-roundtrip" => identification_roundtrip(&mut s),
        "laplace-transform" => laplace_transform(&mut s),
        "norm-axioms" => norm_axioms(&mut s),
        "resolvent-identity" => resolvent_identity(&mut s),
        "semigroup-law" => semigroup_law(&mut s),
        "simple-approximation" => simple_approx(&mut s),
        other => s.checks.push(CheckRecord::failure(
            other,
            "unknown-suite",
            "",
            &crate::Error::InvalidArgument(format!("unknown suite `{other}`")),
        )),
    }
    s.checks
}

struct Suite<'a> {
    name: String,
    ctx: &'a ScenarioContext,
    rng: Rng,
    checks: Vec<CheckRecord>,
}

impl Suite<'_> {
    fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
    }

    fn record(&mut self, name: impl Into<String>, anchor: &str, observed: f64, threshold: Threshold) -> &mut CheckRecord {
        self.checks.push(CheckRecord::new(&self.name, name, anchor, observed, threshold));
        self.checks.last_mut().expect("just pushed")
    }

    /// Upper-bound check whose limit the scenario may override per suite.
    fn at_most(&mut self, name: impl Into<String>, anchor: &str, observed: f64, default: f64) -> &mut CheckRecord {
        let value = self.ctx.tolerance(&self.name, default);
        self.record(name, anchor, observed, Threshold::AtMost { value })
    }

    fn flag(&mut self, name: impl Into<String>, anchor: &str, holds: bool) -> &mut CheckRecord {
        self.checks.push(CheckRecord::flag(&self.name, name, anchor, holds));
        self.checks.last_mut().expect("just pushed")
    }

    /// Runs a block of checks; an error inside it becomes one failing record.
    fn guard(&mut self, name: &str, anchor: &str, block: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = block(self) {
            let suite = self.name.clone();
            self.push(CheckRecord::failure(&suite, name, anchor, &e));
        }
    }

    fn bundle(&self) -> Arc<FiberBundle> {
        self.ctx.bundle.clone()
    }

    fn p(&self) -> f64 {
        self.ctx.p()
    }

    fn function(&mut self, grid: &Arc<GridMeasure>, d: usize, mode: NormMode, p: f64) -> Result<FiberFunction> {
        random_function(&mut self.rng, grid, d, mode, p)
    }
}

fn random_function(rng: &mut Rng, grid: &Arc<GridMeasure>, d: usize, mode: NormMode, p: f64) -> Result<FiberFunction> {
    let values = (0..grid.len()).map(|_| random::vector(rng, d, 1.0)).collect();
    FiberFunction::new(grid.clone(), values, mode, p)
}

fn unit_grid(n: usize) -> Result<Arc<GridMeasure>> {
    Ok(Arc::new(GridMeasure::uniform_interval(0.0, 1.0, n)?))
}

fn scalar_bundle(m: f64, n: usize) -> Result<Arc<FiberBundle>> {
    Ok(Arc::new(build_bundle(&FamilySpec::Constant(Matrix::real_diag(&[m])), unit_grid(n)?)?))
}

/// `M(s) = C₀ + sC₁` with `C₀` strongly dissipative and `C₁` small.
fn random_stable_bundle(rng: &mut Rng, d: usize, n: usize) -> Result<Arc<FiberBundle>> {
    let c0 = random::stable_matrix(rng, d);
    let c1 = random::matrix(rng, d, 0.2 / d as f64);
    let spec = FamilySpec::MatrixProfile(vec![c0, c1]);
    Ok(Arc::new(build_bundle_with(&spec, unit_grid(n)?, &BundleOptions::default())?))
}

fn base_norm(f: &FiberFunction) -> Result<f64> {
    lp_fiber_norm(&f.with_mode(NormMode::Base), None)
}

fn relative(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

struct CorpusCase {
    bundle: Arc<FiberBundle>,
    p: f64,
}

const CORPUS_SIZE: usize = 100;

/// The shared random-bundle corpus: `d ≤ 8`, `N ≤ 256`, `p ∈ {1, 2, 3}`.
fn stable_corpus(seed: u64) -> Result<Vec<CorpusCase>> {
    let mut rng = random::substream(seed, "stable-corpus");
    let mut cases = Vec::with_capacity(CORPUS_SIZE);
    for i in 0..CORPUS_SIZE {
        let d = rng.gen_range(1..=8);
        let n = rng.gen_range(2..=256);
        let bundle = random_stable_bundle(&mut rng, d, n)?;
        cases.push(CorpusCase { bundle, p: [1.0, 2.0, 3.0][i % 3] });
    }
    Ok(cases)
}

fn corpus_detail() -> String {
    format!("{CORPUS_SIZE} random stable bundles, d ≤ 8, N ≤ 256, p ∈ {{1, 2, 3}}")
}

fn extrapolation_isometry(s: &mut Suite) {
    s.guard("isometry", "‖𝓜₋₁g‖₋₁ = ‖g‖", |s| {
        let corpus = stable_corpus(s.ctx.seed())?;
        let mut worst = 0.0f64;
        for case in &corpus {
            let g = s.function(case.bundle.grid(), case.bundle.dim(), NormMode::Base, case.p)?;
            let f = extrapolated_apply(&case.bundle, &g)?;
            let nf = lp_fiber_norm(&f.value, Some(&case.bundle))?;
            let ng = lp_fiber_norm(&g, None)?;
            worst = worst.max(relative((nf - ng).abs(), ng));
        }
        s.at_most("isometry", "‖𝓜₋₁g‖₋₁ = ‖g‖", worst, 1e-10).detail = Some(corpus_detail());
        Ok(())
    });
}

fn identification_roundtrip(s: &mut Suite) {
    s.guard("roundtrip", "𝓜₋₁ ∘ identify = id", |s| {
        let corpus = stable_corpus(s.ctx.seed())?;
        let (mut recon, mut iso, mut ill) = (0.0f64, 0.0f64, 0usize);
        for case in &corpus {
            let f = s.function(case.bundle.grid(), case.bundle.dim(), NormMode::Extrapolation, case.p)?;
            let (g, report) = identify_extrapolation(&case.bundle, &f)?;
            let rebuilt = extrapolated_apply(&case.bundle, &g)?.value;
            let defect = lp_fiber_norm(&rebuilt.sub(&f)?, Some(&case.bundle))?;
            recon = recon.max(relative(defect, lp_fiber_norm(&f, Some(&case.bundle))?));
            iso = iso.max(report.isometry_defect);
            ill += report.ill_conditioned_nodes.len();
        }
        s.at_most("reconstruction", "𝓜₋₁ g = f for g = identify(f)", recon, 1e-10).detail = Some(corpus_detail());
        s.at_most("isometry", "‖f‖₋₁ = ‖g‖", iso, 1e-10);
        s.flag("well-conditioned", "every fiber below the condition cap", ill == 0)
            .detail = Some(format!("{ill} ill-conditioned nodes"));
        Ok(())
    });
}

fn constant_fiber_corollary(s: &mut Suite) {
    let anchor = "‖f‖₋₁ = ‖A⁻¹f‖ for M ≡ A";
    s.guard("corollary", anchor, |s| {
        let grid = unit_grid(33)?;
        let mut matrices = vec![("fixed".to_string(), Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]))];
        for k in 0..10 {
            let d = s.rng.gen_range(1..=4);
            matrices.push((format!("random-{k}"), random::conditioned_matrix(&mut s.rng, d, 1e4)));
        }
        for (k, (label, a)) in matrices.iter().enumerate() {
            let p = [1.0, 2.0, 3.0][k % 3];
            let report = constant_fiber_corollary_check(a, grid.clone(), 50, p, &mut s.rng)?;
            s.at_most(format!("corollary@{label}"), anchor, report.max_defect, 1e-12).detail =
                Some(format!("d = {}, p = {p}, {} samples", a.dim(), report.samples));
        }
        Ok(())
    });
}

/// Random `λ` with `Re λ` at least half a unit above the growth bound.
fn resolvent_point(rng: &mut Rng, omega: f64) -> C64 {
    C64::new(omega + 0.5 + random::uniform(rng, 0.0, 4.0), random::uniform(rng, -4.0, 4.0))
}

fn resolvent_identity(s: &mut Suite) {
    s.guard("resolvent", "R(λ) − R(μ) = (μ − λ)R(λ)R(μ)", |s| {
        let bundle = s.bundle();
        let op = MultOperator::new(bundle.clone(), s.p())?;
        let omega = bundle.stability().omega;
        let (mut identity, mut left, mut right) = (0.0f64, 0.0f64, 0.0f64);
        let mut local = true;
        for _ in 0..50 {
            let lambda = resolvent_point(&mut s.rng, omega);
            let mu = resolvent_point(&mut s.rng, omega);
            let f = s.function(bundle.grid(), bundle.dim(), NormMode::Base, s.p())?;
            let nf = base_norm(&f)?;

            let rl = op.resolvent_apply(lambda, &f)?;
            let rm = op.resolvent_apply(mu, &f)?;
            let rlm = op.resolvent_apply(lambda, &rm)?;
            let lhs = rl.sub(&rm)?;
            let rhs = rlm.scale(mu - lambda);
            let scale = base_norm(&lhs)? + base_norm(&rhs)?;
            identity = identity.max(relative(base_norm(&lhs.sub(&rhs)?)?, scale));

            let back = rl.scale(lambda).sub(&op.apply(&rl)?)?;
            left = left.max(relative(base_norm(&back.sub(&f)?)?, nf));
            let shifted = f.scale(lambda).sub(&op.apply(&f)?)?;
            right = right.max(relative(base_norm(&op.resolvent_apply(lambda, &shifted)?.sub(&f)?)?, nf));

            let mask = random::random_subset(&mut s.rng, f.values().len());
            local &= op.resolvent_apply(lambda, &f.restrict(&mask)?)? == rl.restrict(&mask)?;
        }
        s.at_most("resolvent-identity", "R(λ) − R(μ) = (μ − λ)R(λ)R(μ)", identity, 1e-10)
            .detail = Some("50 seeded (λ, μ, f)".into());
        s.at_most("inversion-left", "(λ − 𝓜)R(λ)f = f", left, 1e-10);
        s.at_most("inversion-right", "R(λ)(λ − 𝓜)f = f", right, 1e-10);
        s.flag("locality", "R(λ)(1_E f) = 1_E R(λ)f", local);
        Ok(())
    });
}

const APPROX_LAMBDAS: [f64; 3] = [10.0, 100.0, 1000.0];

fn approximate_identity(s: &mut Suite) {
    s.guard("approximate-identity", "λR(λ)f → f", |s| {
        let mut bundles = vec![("configured".to_string(), s.bundle())];
        for k in 0..3 {
            let d = s.rng.gen_range(1..=4);
            bundles.push((format!("random-{k}"), random_stable_bundle(&mut s.rng, d, 33)?));
        }
        for (label, bundle) in bundles {
            let op = MultOperator::new(bundle.clone(), s.p())?;
            let f = s.function(bundle.grid(), bundle.dim(), NormMode::Base, s.p())?;
            let errors = op.resolvent_approx_identity(&f, &APPROX_LAMBDAS)?;
            let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
            let inv: Vec<f64> = APPROX_LAMBDAS.iter().map(|l| 1.0 / l).collect();
            s.flag(format!("strictly-decreasing@{label}"), "‖λR(λ)f − f‖ decreasing in λ", decreasing)
                .convergence = convergence_table(&inv, &errors);
            let final_error = relative(errors[errors.len() - 1], base_norm(&f)?);
            s.at_most(format!("final-error@{label}"), "‖λR(λ)f − f‖ ≤ 1e-2‖f‖ at λ = 1000", final_error, 1e-2);
        }
        Ok(())
    });
}

fn semigroup_law(s: &mut Suite) {
    let anchor = "𝒯(t + r) = 𝒯(t)𝒯(r)";
    s.guard("semigroup", anchor, |s| {
        let bundle = s.bundle();
        let sg = MultSemigroup::new(bundle.clone(), None)?;
        let (grid, d, p) = (bundle.grid().clone(), bundle.dim(), s.p());

        let f = s.function(&grid, d, NormMode::Base, p)?;
        let identity = sg.propagators(0.0)?.iter().all(|e| *e == Matrix::identity(d)) && sg.apply(0.0, &f)? == f;
        s.flag("identity-at-zero", "𝒯(0) = I", identity);

        let (mut law, mut local) = (0.0f64, true);
        for _ in 0..20 {
            let t = random::uniform(&mut s.rng, 0.0, 2.0);
            let r = random::uniform(&mut s.rng, 0.0, 2.0);
            let f = s.function(&grid, d, NormMode::Base, p)?;
            let joint = sg.apply(t + r, &f)?;
            let split = sg.apply(t, &sg.apply(r, &f)?)?;
            law = law.max(relative(base_norm(&joint.sub(&split)?)?, base_norm(&f)?));
            let mask = random::random_subset(&mut s.rng, grid.len());
            local &= sg.apply(t, &f.restrict(&mask)?)? == sg.apply(t, &f)?.restrict(&mask)?;
        }
        s.at_most("law", anchor, law, 1e-10).detail = Some("20 seeded (t, r, f)".into());
        s.flag("locality", "𝒯(t)(1_E f) = 1_E 𝒯(t)f", local);

        let h = 2f64.powi(-20);
        let drift = relative(base_norm(&sg.apply(h, &f)?.sub(&f)?)?, base_norm(&f)?);
        s.at_most("strong-continuity", "𝒯(h)f → f as h ↓ 0", drift, 1e-4).detail = Some(format!("h = {h:e}"));

        let times = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0];
        let ty = sg.stability();
        let mut ratio = 0.0f64;
        for &t in &times {
            for e in sg.propagators(t)? {
                ratio = ratio.max(op_norm(&e)? / (ty.m * (ty.omega * t).exp()));
            }
        }
        let (m_hat, omega_hat) = sg.growth_bound_estimate(&times)?;
        s.record("type-bound", "‖𝒯(t)‖ ≤ M e^{ωt}", ratio, Threshold::AtMost { value: 1.0 + 1e-9 }).detail =
            Some(format!("claimed ({}, {}), fitted ({m_hat:.6}, {omega_hat:.6})", ty.m, ty.omega));
        Ok(())
    });
}

fn fd_generator(s: &mut Suite) {
    s.guard("fd-generator", "(𝒯(h)f − f)/h → 𝓜f", |s| {
        let bundle = s.bundle();
        let sg = MultSemigroup::new(bundle.clone(), None)?;
        let f = s.function(bundle.grid(), bundle.dim(), NormMode::Base, s.p())?;
        let hs: Vec<f64> = (3..=10).map(|k| 2f64.powi(-k)).collect();
        let errors = sg.generator_fd_check(&f, &hs)?;
        let table = convergence_table(&hs, &errors);
        let orders: Vec<f64> = table.iter().filter_map(|r| r.observed_order).collect();
        let lo = orders.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let order = Threshold::Within { lo: 0.9, hi: 1.1 };
        s.record("observed-order-min", "first-order difference quotient", lo, order).convergence = table;
        s.record("observed-order-max", "first-order difference quotient", hi, order);

        // m ≡ −1, f ≡ 1: (e^{−h} − 1)/h + 1 = h/2 + O(h²).
        let scalar = scalar_bundle(-1.0, 9)?;
        let one = FiberFunction::constant(scalar.grid().clone(), Vector::from_real(&[1.0]), 2.0)?;
        let h = 0.01;
        let e = MultSemigroup::new(scalar, None)?.generator_fd_check(&one, &[h])?[0];
        s.at_most("taylor-scalar", "error ≈ h/2 for m ≡ −1, f ≡ 1", (e / (h / 2.0) - 1.0).abs(), 0.1).detail =
            Some(format!("h = {h}, error = {e:e}"));
        Ok(())
    });
}

fn extrapolated_semigroup(s: &mut Suite) {
    let anchor = "𝒮(t + r) = 𝒮(t)𝒮(r) in ‖·‖₋₁";
    s.guard("extrapolated-semigroup", anchor, |s| {
        let bundle = s.bundle();
        let sg = MultSemigroup::new(bundle.clone(), None)?;
        let (grid, d, p) = (bundle.grid().clone(), bundle.dim(), s.p());
        let ext = |f: &FiberFunction| lp_fiber_norm(f, Some(&bundle));

        let (mut law, mut commute, mut extends) = (0.0f64, 0.0f64, true);
        for _ in 0..20 {
            let t = random::uniform(&mut s.rng, 0.0, 2.0);
            let r = random::uniform(&mut s.rng, 0.0, 2.0);
            let g = s.function(&grid, d, NormMode::Base, p)?;
            let f = extrapolated_apply(&bundle, &g)?;
            let joint = extrapolated_semigroup_apply(&bundle, t + r, &f)?.value;
            let split =
                extrapolated_semigroup_apply(&bundle, t, &extrapolated_semigroup_apply(&bundle, r, &f)?)?.value;
            law = law.max(relative(ext(&joint.sub(&split)?)?, ext(&f.value)?));

            let moved = extrapolated_semigroup_apply(&bundle, t, &f)?.value;
            let tg = sg.apply(t, &g)?;
            let lifted = extrapolated_apply(&bundle, &tg)?.value;
            let props = sg.propagators(t)?;
            for (i, prop) in props.iter().enumerate() {
                let m = bundle.eval_fiber_operator(i)?;
                let scale = m.norm_one() * prop.norm_one() * g.value(i).norm();
                commute = commute.max(relative((moved.value(i) - lifted.value(i)).norm(), scale));
            }

            let plain = ExtrapolatedFunction::without_witness(g.with_mode(NormMode::Extrapolation))?;
            let image = extrapolated_semigroup_apply(&bundle, t, &plain)?.value;
            extends &= image.values() == tg.values();
        }
        s.at_most("law", anchor, law, 1e-10).detail = Some("20 seeded (t, r, g)".into());
        s.at_most("commutation", "𝒮(t)𝓜₋₁g = 𝓜₋₁𝒯(t)g", commute, 1e-11);
        s.flag("extends", "𝒮(t) restricted to the base space is 𝒯(t)", extends);

        let g = s.function(&grid, d, NormMode::Base, p)?;
        let f = extrapolated_apply(&bundle, &g)?;
        let h = 2f64.powi(-20);
        let moved = extrapolated_semigroup_apply(&bundle, h, &f)?.value;
        let drift = relative(ext(&moved.sub(&f.value)?)?, ext(&f.value)?);
        s.at_most("strong-continuity", "𝒮(h)f → f in ‖·‖₋₁", drift, 1e-4).detail = Some(format!("h = {h:e}"));
        Ok(())
    });
}

/// `|U(1, 0) − exp(∫₀¹ a)|` for scalar `a` under step halving, with the
/// smallest and largest ratio of consecutive errors.
fn halving_ratios(profile: Profile, exact: f64, levels: std::ops::RangeInclusive<i32>) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    let mut hs = Vec::new();
    let mut errors = Vec::new();
    for k in levels {
        let h = 2f64.powi(-k);
        let u = EvolutionFamily::new(TimeFamily::Scalar(profile.clone()), h)?.evolution_step(1.0, 0.0)?;
        hs.push(h);
        errors.push((u[(0, 0)].re - exact).abs().max(u[(0, 0)].im.abs()));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    // NaN ratios (0/0) must survive the reduction.
    let lo = ratios.iter().copied().fold(f64::INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.min(b) });
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) });
    Ok((hs, errors, lo, hi))
}

fn evolution_family(s: &mut Suite) {
    s.guard("order", "U(1, 0) = e^{∫a} at order 2", |s| {
        let ratio = Threshold::Within { lo: 3.5, hi: 4.5 };
        let cases = [
            ("linear", Profile::Polynomial { coeffs: vec![0.0, -2.0] }, "a(t) = −2t"),
            ("quadratic", Profile::Polynomial { coeffs: vec![0.0, 0.0, -3.0] }, "a(t) = −3t²"),
        ];
        for (label, profile, what) in cases {
            let (hs, errors, lo, hi) = halving_ratios(profile, (-1.0f64).exp(), 1..=6)?;
            s.record(format!("halving-ratio-min@{label}"), "U(1, 0) = e^{−1} at order 2", lo, ratio).detail =
                Some(what.to_string());
            s.checks.last_mut().expect("just pushed").convergence = convergence_table(&hs, &errors);
            s.record(format!("halving-ratio-max@{label}"), "U(1, 0) = e^{−1} at order 2", hi, ratio);
        }
        Ok(())
    });

    s.guard("cocycle", "U(t, r)U(r, s) = U(t, s)", |s| {
        let a = random::stable_matrix(&mut s.rng, 3);
        let h = 1.0 / 16.0;
        let ev = EvolutionFamily::new(TimeFamily::Constant(a), h)?;
        let mut identity = true;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let mut k: Vec<i32> = (0..3).map(|_| s.rng.gen_range(0..=32)).collect();
            k.sort_unstable();
            let (ts, tr, tt) = (k[0] as f64 * h, k[1] as f64 * h, k[2] as f64 * h);
            worst = worst.max(ev.cocycle_check(tt, tr, ts)?);
            identity &= ev.evolution_step(tr, tr)? == Matrix::identity(3);
        }
        s.flag("identity", "U(t, t) = I", identity);
        s.at_most("cocycle@constant", "U(t, r)U(r, s) = U(t, s)", worst, 1e-12).detail =
            Some("random 3×3 A, h = 1/16, aligned t ≥ r ≥ s".into());

        let cfg = &s.ctx.config.evolution;
        let ev = cfg.semigroup()?.evolution().clone();
        let step = ev.step();
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let mut k: Vec<i32> = (0..3).map(|_| s.rng.gen_range(0..=(cfg.nodes as i32))).collect();
            k.sort_unstable();
            let (ts, tr, tt) = (k[0] as f64 * step, k[1] as f64 * step, k[2] as f64 * step);
            let scale = op_norm(&ev.evolution_step(tt, ts)?)?.max(1.0);
            worst = worst.max(ev.cocycle_check(tt, tr, ts)? / scale);
        }
        s.at_most("cocycle@configured", "U(t, r)U(r, s) = U(t, s)", worst, 1e-12);
        Ok(())
    });
}

fn sine_circle(n: usize) -> Result<(Arc<GridMeasure>, FiberFunction, FiberFunction)> {
    let grid = Arc::new(GridMeasure::circle(1.0, n)?);
    let f = FiberFunction::from_fn(grid.clone(), 2.0, |s| Vector::from_real(&[(2.0 * PI * s).sin()]))?;
    let df = FiberFunction::from_fn(grid.clone(), 2.0, |s| Vector::from_real(&[2.0 * PI * (2.0 * PI * s).cos()]))?;
    Ok((grid, f, df))
}

fn evolution_semigroup(s: &mut Suite) {
    s.guard("law", "T(t + r) = T(t)T(r)", |s| {
        let cfg = s.ctx.config.evolution.clone();
        let es = cfg.semigroup()?;
        let f = cfg.initial_function(s.p(), &s.ctx.base_dir)?;
        let dt = es.spacing();
        s.flag("identity-at-zero", "T(0) = I", es.apply(0.0, &f)? == f);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let t = s.rng.gen_range(0..2 * cfg.nodes) as f64 * dt;
            let r = s.rng.gen_range(0..2 * cfg.nodes) as f64 * dt;
            let joint = es.apply(t + r, &f)?;
            let split = es.apply(t, &es.apply(r, &f)?)?;
            worst = worst.max(relative(base_norm(&joint.sub(&split)?)?, base_norm(&f)?));
        }
        s.at_most("law", "T(t + r) = T(t)T(r)", worst, 1e-9).detail = Some("20 grid-aligned (t, r)".into());
        Ok(())
    });

    s.guard("generator", "Gf = 𝒜f − f′", |s| {
        let sizes = [64usize, 128, 256, 512];
        let mut hs = Vec::new();
        let mut errors = Vec::new();
        for &n in &sizes {
            let (grid, f, df) = sine_circle(n)?;
            let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::real_diag(&[-1.0])), 1.0 / n as f64)?;
            let es = EvolutionSemigroup::new(ev, grid)?;
            hs.push(es.spacing());
            errors.push(es.generator_check(&f, Some(&df))?);
        }
        let table = convergence_table(&hs, &errors);
        let lo = table.iter().filter_map(|r| r.observed_order).fold(f64::INFINITY, f64::min);
        s.record("generator-order", "Gf = 𝒜f − f′", lo, Threshold::AtLeast { value: 0.9 }).convergence = table;
        s.checks.last_mut().expect("just pushed").detail = Some("A ≡ −1, f = sin(2πs), N ∈ {64, 128, 256, 512}".into());
        Ok(())
    });

    s.guard("periodicity", "T(L) is the identity shift", |s| {
        let (grid, f, _) = sine_circle(16)?;
        let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::zeros(1)), 1.0 / 16.0)?;
        let es = EvolutionSemigroup::new(ev, grid)?;
        s.flag("periodicity", "shift by the full circle is the identity", es.apply(1.0, &f)? == f);
        Ok(())
    });

    s.guard("autonomous", "T(t)x₀ = e^{tA}x₀ for constant A and x₀", |s| {
        let a = random::stable_matrix(&mut s.rng, 2);
        let x0 = random::vector(&mut s.rng, 2, 1.0);
        let grid = Arc::new(GridMeasure::circle(1.0, 32)?);
        let es = EvolutionSemigroup::new(EvolutionFamily::new(TimeFamily::Constant(a.clone()), 1.0 / 32.0)?, grid.clone())?;
        let f = FiberFunction::constant(grid, x0.clone(), 2.0)?;
        let t = 5.0 / 32.0;
        let expected = mat_exp(&a, t)?.apply(&x0);
        let got = es.apply(t, &f)?;
        let worst = got.values().iter().map(|v| (v - &expected).norm()).fold(0.0, f64::max);
        s.at_most("autonomous-consistency", "T(t)x₀ = e^{tA}x₀", relative(worst, x0.norm()), 1e-12);
        Ok(())
    });
}

fn norm_axioms(s: &mut Suite) {
    s.guard("norm-axioms", "L^p fiber norm axioms", |s| {
        let bundle = s.bundle();
        let (grid, d) = (bundle.grid().clone(), bundle.dim());
        let mut triangle = f64::NEG_INFINITY;
        let mut homogeneity = 0.0f64;
        let mut positive = true;
        for k in 0..1000 {
            let p = [1.0, 2.0, 3.0][k % 3];
            let mode = if k % 2 == 0 { NormMode::Base } else { NormMode::Extrapolation };
            let f = s.function(&grid, d, mode, p)?;
            let g = s.function(&grid, d, mode, p)?;
            let alpha = random::complex(&mut s.rng, 3.0);
            let norm = |x: &FiberFunction| lp_fiber_norm(x, Some(&bundle));
            let (nf, ng) = (norm(&f)?, norm(&g)?);
            triangle = triangle.max((norm(&f.add(&g)?)? - nf - ng) / (nf + ng));
            homogeneity = homogeneity.max(relative((norm(&f.scale(alpha))? - alpha.norm() * nf).abs(), alpha.norm() * nf));
            positive &= nf > 0.0;
        }
        s.at_most("triangle-inequality", "‖f + g‖ ≤ ‖f‖ + ‖g‖", triangle, 1e-12).detail =
            Some("1000 seeded triples, both modes, p ∈ {1, 2, 3}".into());
        s.at_most("homogeneity", "‖αf‖ = |α|‖f‖", homogeneity, 1e-12);
        s.flag("positivity", "‖f‖ > 0 for f ≠ 0", positive);
        let zero = FiberFunction::zeros(grid, d, s.p())?;
        s.flag("zero", "‖0‖ = 0", lp_fiber_norm(&zero, Some(&bundle))? == 0.0);
        Ok(())
    });
}

fn simple_approx(s: &mut Suite) {
    let anchor = "‖f − f_k‖ ≤ √d 2^{−k}(1 + max‖M(s)⁻¹‖)";
    s.guard("simple-approximation", anchor, |s| {
        let bundle = s.bundle();
        for mode in [NormMode::Base, NormMode::Extrapolation] {
            let label = match mode {
                NormMode::Base => "base",
                NormMode::Extrapolation => "extrapolation",
            };
            let f = s.function(bundle.grid(), bundle.dim(), mode, s.p())?;
            let mut worst = 0.0f64;
            let mut errors = Vec::new();
            let mut hs = Vec::new();
            for k in 4..=20u32 {
                let (_, err) = simple_approximation(&f, k, Some(&bundle))?;
                let bound = simple_approximation_bound(bundle.dim(), k, Some(&bundle))?;
                worst = worst.max(err / bound);
                errors.push(err);
                hs.push(2f64.powi(-(k as i32)));
            }
            let monotone = errors.windows(2).all(|w| w[1] <= w[0]);
            s.record(format!("within-bound@{label}"), anchor, worst, Threshold::AtMost { value: 1.0 })
                .detail = Some("k = 4…20, observed is error / bound".into());
            s.flag(format!("non-increasing@{label}"), "error non-increasing in k", monotone).convergence =
                convergence_table(&hs, &errors);
        }
        Ok(())
    });
}

fn domain(s: &mut Suite) {
    s.guard("domain", "(s ↦ M(s)f(s)) ∈ L^p", |s| {
        let bounded = FamilySpec::ScalarProfile(Profile::Polynomial { coeffs: vec![-1.0, -1.0] });
        let refinements: Vec<GridMeasure> =
            [9, 17, 33, 65].iter().map(|&n| GridMeasure::uniform_interval(0.0, 1.0, n)).collect::<Result<_>>()?;
        let v = domain_membership(&bounded, |x| Vector::from_real(&[x.sin() + 2.0]), &refinements, 2.0)?;
        s.flag("bounded-family", "bounded family on a compact set: member", v.member).detail =
            Some(format!("{:?}", v.norm_sequence));

        let growing = FamilySpec::ScalarProfile(Profile::Polynomial { coeffs: vec![-1.0, -2.0, -1.0] });
        let truncations: Vec<GridMeasure> = [1.0f64, 2.0, 4.0, 8.0, 16.0]
            .iter()
            .map(|&r| GridMeasure::uniform_interval(0.0, r, (64.0 * r) as usize + 1))
            .collect::<Result<_>>()?;
        let slow = domain_membership(&growing, |x| Vector::from_real(&[1.0 / (1.0 + x)]), &truncations, 2.0)?;
        s.flag("slow-decay", "m = −(1+s)², f = (1+s)⁻¹: non-member", !slow.member).detail =
            Some(format!("{:?}", slow.norm_sequence));
        let fast = domain_membership(&growing, |x| Vector::from_real(&[(1.0 + x).powi(-3)]), &truncations, 2.0)?;
        s.flag("fast-decay", "m = −(1+s)², f = (1+s)⁻³: member", fast.member).detail =
            Some(format!("{:?}", fast.norm_sequence));
        Ok(())
    });
}

fn laplace_transform(s: &mut Suite) {
    let anchor = "R(λ, 𝓜)f = ∫₀^∞ e^{−λt}𝒯(t)f dt";
    s.guard("laplace", anchor, |s| {
        let bundle = scalar_bundle(-1.0, 9)?;
        let f = FiberFunction::constant(bundle.grid().clone(), Vector::from_real(&[1.0]), 2.0)?;
        let defect = MultSemigroup::new(bundle, None)?.laplace_resolvent_defect(1.0, &f, 40.0, 20_000)?;
        s.at_most("laplace@scalar", anchor, defect, 1e-6).detail = Some("m ≡ −1, f ≡ 1, λ = 1, T = 40".into());
        Ok(())
    });
}
