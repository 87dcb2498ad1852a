//! Non-autonomous families `A(t)`, their evolution families `U(t, s)` and the
//! evolution semigroup `(T(t)f)(s) = U(s, s − t) f(s − t)` on a circle.
//!
//! `U(t, s)` is a product of exponential-midpoint substeps
//! `exp((b − a) A((a + b)/2))` over a global lattice `kh`; the interval ends
//! `s` and `t` cut the first and last substep. Composition at a lattice point
//! therefore reproduces exactly the same factors.

use std::io::Write;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rustfft::FftPlanner;

use crate::bundle::{NormMode, Profile};
use crate::error::{Error, Result};
use crate::grid::GridMeasure;
use crate::numerics::{mat_exp, op_norm, Matrix, Vector, C64};
use crate::space::{lp_fiber_norm, FiberFunction};

/// Time-dependent generator `t ↦ A(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeFamily {
    Constant(Matrix),
    /// `d = 1`, `A(t) = a(t)`
    Scalar(Profile),
    /// `A(t) = a(t) A₀`; all values commute.
    Commuting { profile: Profile, base: Matrix },
    /// Piecewise-linear interpolation between tabulated times.
    Tabulated { times: Vec<f64>, matrices: Vec<Matrix> },
}

impl TimeFamily {
    pub fn dim(&self) -> usize {
        match self {
            TimeFamily::Constant(m) | TimeFamily::Commuting { base: m, .. } => m.dim(),
            TimeFamily::Scalar(_) => 1,
            TimeFamily::Tabulated { matrices, .. } => matrices.first().map(Matrix::dim).unwrap_or(1),
        }
    }

    pub fn eval(&self, t: f64) -> Result<Matrix> {
        let m = match self {
            TimeFamily::Constant(m) => m.clone(),
            TimeFamily::Scalar(p) => Matrix::scalar(C64::new(p.eval(t), 0.0)),
            TimeFamily::Commuting { profile, base } => base.scale_real(profile.eval(t)),
            TimeFamily::Tabulated { times, matrices } => {
                if times.len() != matrices.len() || times.is_empty() {
                    return Err(Error::InvalidArgument("tabulated family needs one matrix per time".into()));
                }
                let (first, last) = (times[0], times[times.len() - 1]);
                if !(t >= first && t <= last) {
                    return Err(Error::Range(format!("t = {t} outside tabulated range [{first}, {last}]")));
                }
                let j = times.partition_point(|&x| x <= t).clamp(1, times.len().max(2) - 1);
                if times.len() == 1 {
                    matrices[0].clone()
                } else {
                    let (t0, t1) = (times[j - 1], times[j]);
                    let w = (t - t0) / (t1 - t0);
                    &matrices[j - 1].scale_real(1.0 - w) + &matrices[j].scale_real(w)
                }
            }
        };
        if !m.is_finite() {
            return Err(Error::Range(format!("A({t}) is not finite")));
        }
        Ok(m)
    }
}

/// `U(t, s)` by exponential-midpoint substeps of nominal length `step`.
#[derive(Clone, Debug)]
pub struct EvolutionFamily {
    family: TimeFamily,
    step: f64,
    /// Full-substep exponentials keyed by lattice index.
    memo: Arc<Mutex<HashMap<i64, Matrix>>>,
}

/// Relative slack when deciding whether a time sits on a lattice.
const LATTICE_SLACK: f64 = 1e-9;

fn snap_to_lattice(x: f64) -> Option<f64> {
    let r = x.round();
    ((x - r).abs() <= LATTICE_SLACK * x.abs().max(1.0)).then_some(r)
}

impl EvolutionFamily {
    pub fn new(family: TimeFamily, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step h = {step} must be positive")));
        }
        Ok(Self { family, step, memo: Arc::default() })
    }

    pub fn family(&self) -> &TimeFamily {
        &self.family
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// Substep end points `s = p₀ < p₁ < … < pₙ = t`.
    fn breakpoints(&self, t: f64, s: f64) -> Vec<f64> {
        let h = self.step;
        let (xs, xt) = (s / h, t / h);
        let first = match snap_to_lattice(xs) {
            Some(k) => k + 1.0,
            None => xs.ceil(),
        };
        let last = match snap_to_lattice(xt) {
            Some(k) => k - 1.0,
            None => xt.floor(),
        };
        let mut pts = vec![s];
        let mut k = first;
        while k <= last {
            pts.push(k * h);
            k += 1.0;
        }
        pts.push(t);
        pts
    }

    fn substep(&self, a: f64, b: f64) -> Result<Matrix> {
        let compute = || mat_exp(&self.family.eval(0.5 * (a + b))?, b - a);
        let k = (a / self.step).round();
        if a != k * self.step || b != (k + 1.0) * self.step {
            return compute();
        }
        let key = k as i64;
        if let Some(m) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(m.clone());
        }
        let m = compute()?;
        self.memo.lock().expect("memo poisoned").insert(key, m.clone());
        Ok(m)
    }

    /// `U(t, s)` for `t ≥ s`; exactly the identity when `t = s`.
    pub fn evolution_step(&self, t: f64, s: f64) -> Result<Matrix> {
        if !(t >= s) {
            return Err(Error::Ordering(format!("U(t, s) needs t ≥ s, got t = {t}, s = {s}")));
        }
        let mut u = Matrix::identity(self.dim());
        if t == s {
            return Ok(u);
        }
        for w in self.breakpoints(t, s).windows(2) {
            let factor = self.substep(w[0], w[1])?;
            u = &factor * &u;
        }
        Ok(u)
    }

    /// `‖U(t, s) − U(t, r) U(r, s)‖₂` for `t ≥ r ≥ s`.
    pub fn cocycle_check(&self, t: f64, r: f64, s: f64) -> Result<f64> {
        if !(t >= r && r >= s) {
            return Err(Error::Ordering(format!("cocycle check needs t ≥ r ≥ s, got {t}, {r}, {s}")));
        }
        let direct = self.evolution_step(t, s)?;
        let split = &self.evolution_step(t, r)? * &self.evolution_step(r, s)?;
        op_norm(&(&direct - &split))
    }
}

/// The evolution semigroup on a circle grid whose spacing is a whole number of substeps.
#[derive(Clone, Debug)]
pub struct EvolutionSemigroup {
    evolution: EvolutionFamily,
    grid: Arc<GridMeasure>,
    spacing: f64,
}

impl EvolutionSemigroup {
    pub fn new(evolution: EvolutionFamily, grid: Arc<GridMeasure>) -> Result<Self> {
        let spacing = grid
            .circle_spacing()
            .ok_or_else(|| Error::InvalidArgument("the evolution semigroup lives on a circle grid".into()))?;
        if snap_to_lattice(spacing / evolution.step()).is_none() {
            return Err(Error::Alignment { t: spacing, spacing: evolution.step() });
        }
        Ok(Self { evolution, grid, spacing })
    }

    pub fn evolution(&self) -> &EvolutionFamily {
        &self.evolution
    }

    pub fn grid(&self) -> &Arc<GridMeasure> {
        &self.grid
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    fn shift_of(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("semigroup time t = {t} must be nonnegative")));
        }
        let k = snap_to_lattice(t / self.spacing).ok_or(Error::Alignment { t, spacing: self.spacing })?;
        Ok(k as usize)
    }

    fn check_input(&self, f: &FiberFunction) -> Result<()> {
        if **f.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        if f.dim() != self.evolution.dim() {
            return Err(Error::DimensionMismatch { expected: self.evolution.dim(), found: f.dim() });
        }
        Ok(())
    }

    /// `g(sᵢ) = U(sᵢ, sᵢ − t) f(sᵢ − t)` with the shift taken modulo the circle.
    pub fn apply(&self, t: f64, f: &FiberFunction) -> Result<FiberFunction> {
        self.check_input(f)?;
        let k = self.shift_of(t)?;
        let n = self.grid.len();
        let nodes = self.grid.nodes();
        f.map_nodes(|i, _| {
            let src = (i + n - k % n) % n;
            let u = self.evolution.evolution_step(nodes[i], nodes[i] - t)?;
            Ok(u.apply(f.value(src)))
        })
    }

    /// `(𝒜f)(s) = A(s) f(s)`
    pub fn apply_generator_family(&self, f: &FiberFunction) -> Result<FiberFunction> {
        self.check_input(f)?;
        let nodes = self.grid.nodes();
        f.map_nodes(|i, v| Ok(self.evolution.family().eval(nodes[i])?.apply(v)))
    }

    /// `‖(T(Δs)f − f)/Δs − (𝒜f − f′)‖`, with `f′` given or obtained spectrally.
    pub fn generator_check(&self, f: &FiberFunction, derivative: Option<&FiberFunction>) -> Result<f64> {
        self.check_input(f)?;
        let df = match derivative {
            Some(d) => {
                self.check_input(d)?;
                d.clone()
            }
            None => spectral_derivative(f)?,
        };
        let h = self.spacing;
        let quotient = self.apply(h, f)?.sub(f)?.scale(C64::new(1.0 / h, 0.0));
        let target = self.apply_generator_family(f)?.sub(&df)?;
        lp_fiber_norm(&quotient.sub(&target)?.with_mode(NormMode::Base), None)
    }

    /// `f, T(τ)f, T(2τ)f, …` for `steps` applications of `T(τ)`.
    pub fn trajectory(&self, f: &FiberFunction, tau: f64, steps: usize) -> Result<Vec<(f64, FiberFunction)>> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut current = f.clone();
        out.push((0.0, current.clone()));
        for k in 1..=steps {
            current = self.apply(tau, &current)?;
            out.push((k as f64 * tau, current.clone()));
        }
        Ok(out)
    }
}

/// Writes a trajectory as `t, node, re0, im0, …` rows.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &[(f64, FiberFunction)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let d = trajectory.first().map(|(_, f)| f.dim()).unwrap_or(1);
    let mut header = vec!["t".to_string(), "node".to_string()];
    for k in 0..d {
        header.push(format!("re{k}"));
        header.push(format!("im{k}"));
    }
    w.write_record(&header)?;
    for (t, f) in trajectory {
        for (s, v) in f.grid().nodes().iter().zip(f.values()) {
            let mut row = vec![format!("{t:e}"), format!("{s:e}")];
            for z in v.as_slice() {
                row.push(format!("{:e}", z.re));
                row.push(format!("{:e}", z.im));
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Tail amplitude (relative) above which a function is not treated as smooth.
const SPECTRAL_TAIL_LIMIT: f64 = 1e-6;

/// `f′` on a circle grid by FFT differentiation, per component. Fails when
/// the upper half of the spectrum carries visible energy.
pub fn spectral_derivative(f: &FiberFunction) -> Result<FiberFunction> {
    let length = match f.grid().topology() {
        crate::numerics::Topology::Circle { length } => *length,
        _ => return Err(Error::MissingDerivative("spectral differentiation needs a circle grid".into())),
    };
    let n = f.grid().len();
    let d = f.dim();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut derived = vec![vec![C64::new(0.0, 0.0); d]; n];
    for comp in 0..d {
        let mut buf: Vec<C64> = f.values().iter().map(|v| v[comp]).collect();
        fft.process(&mut buf);
        let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        let tail: f64 = buf
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let freq = if *k <= n / 2 { *k } else { n - k };
                4 * freq > n
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        if total > 0.0 && (tail / total).sqrt() > SPECTRAL_TAIL_LIMIT {
            return Err(Error::MissingDerivative(format!(
                "component {comp} is not resolved on {n} nodes; supply an analytic derivative"
            )));
        }
        for (k, z) in buf.iter_mut().enumerate() {
            let freq = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            *z *= C64::new(0.0, 2.0 * std::f64::consts::PI * freq / length);
        }
        ifft.process(&mut buf);
        for (i, z) in buf.into_iter().enumerate() {
            derived[i][comp] = z / n as f64;
        }
    }
    FiberFunction::new(
        f.grid().clone(),
        derived.into_iter().map(Vector::new).collect(),
        NormMode::Base,
        f.p(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn linear_profile() -> TimeFamily {
        TimeFamily::Scalar(Profile::Polynomial { coeffs: vec![0.0, -2.0] })
    }

    #[test]
    fn equal_times_give_identity() {
        let ev = EvolutionFamily::new(linear_profile(), 0.1).unwrap();
        assert_eq!(ev.evolution_step(0.37, 0.37).unwrap(), Matrix::identity(1));
        assert!(matches!(ev.evolution_step(0.0, 1.0), Err(Error::Ordering(_))));
    }

    #[test]
    fn autonomous_reduction() {
        let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);
        let ev = EvolutionFamily::new(TimeFamily::Constant(a.clone()), 0.05).unwrap();
        let u = ev.evolution_step(1.3, 0.21).unwrap();
        assert!(u.max_abs_diff(&mat_exp(&a, 1.09).unwrap()) < 1e-13);
    }

    #[test]
    fn linear_scalar_profile_is_integrated_exactly() {
        // The midpoint rule is exact for linear a(t), so U(1, 0) = e⁻¹ at any h.
        for h in [0.1, 0.05, 0.025] {
            let ev = EvolutionFamily::new(linear_profile(), h).unwrap();
            let u = ev.evolution_step(1.0, 0.0).unwrap()[(0, 0)].re;
            assert!((u - (-1f64).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_scalar_profile_is_second_order() {
        // a(t) = −3t², U(1, 0) = e⁻¹
        let family = TimeFamily::Scalar(Profile::Polynomial { coeffs: vec![0.0, 0.0, -3.0] });
        let errs: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&h| {
                let u = EvolutionFamily::new(family.clone(), h).unwrap().evolution_step(1.0, 0.0).unwrap();
                (u[(0, 0)].re - (-1f64).exp()).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn cocycle_aligned_constant() {
        let a = Matrix::from_real_rows(&[&[-1.0, 2.0], &[-0.5, -1.5]]);
        let ev = EvolutionFamily::new(TimeFamily::Constant(a), 0.125).unwrap();
        assert!(ev.cocycle_check(2.0, 0.75, 0.0).unwrap() <= 1e-12);
        assert!(ev.cocycle_check(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn cocycle_misaligned_quadratic_is_second_order() {
        let family = TimeFamily::Scalar(Profile::Polynomial { coeffs: vec![0.0, 0.0, -3.0] });
        let defects: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let ev = EvolutionFamily::new(family.clone(), h).unwrap();
                // r sits a third of the way into a substep.
                ev.cocycle_check(1.0, 0.5 + h / 3.0, 0.0).unwrap()
            })
            .collect();
        for w in defects.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 3.0, "{defects:?}");
        }
    }

    #[test]
    fn cocycle_commuting_family() {
        let family = TimeFamily::Commuting {
            profile: Profile::Cosine { mean: -1.0, amplitude: 0.5, period: 1.0 },
            base: Matrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 2.0]]),
        };
        for h in [0.05, 0.025] {
            let ev = EvolutionFamily::new(family.clone(), h).unwrap();
            for r in [0.3, 0.5 + h / 7.0, 0.91] {
                assert!(ev.cocycle_check(1.0, r, 0.0).unwrap() <= 1e-2 * h * h, "h={h} r={r}");
            }
        }
    }

    fn circle(n: usize) -> Arc<GridMeasure> {
        Arc::new(GridMeasure::circle(1.0, n).unwrap())
    }

    fn sine(grid: &Arc<GridMeasure>) -> FiberFunction {
        FiberFunction::from_fn(grid.clone(), 2.0, |s| Vector::from_real(&[(2.0 * PI * s).sin()])).unwrap()
    }

    #[test]
    fn evolution_semigroup_closed_form() {
        let grid = circle(64);
        let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::real_diag(&[-1.0])), 1.0 / 128.0).unwrap();
        let sg = EvolutionSemigroup::new(ev, grid.clone()).unwrap();
        let f = sine(&grid);
        assert_eq!(sg.apply(0.0, &f).unwrap(), f);
        let t = 5.0 / 64.0;
        let g = sg.apply(t, &f).unwrap();
        for (s, v) in grid.nodes().iter().zip(g.values()) {
            let exact = (-t).exp() * (2.0 * PI * (s - t)).sin();
            assert!((v[0].re - exact).abs() < 1e-13);
        }
        assert!(matches!(sg.apply(0.3 / 64.0, &f), Err(Error::Alignment { .. })));
    }

    #[test]
    fn evolution_semigroup_law_periodic_family() {
        let grid = circle(32);
        let family = TimeFamily::Commuting {
            profile: Profile::Cosine { mean: -0.5, amplitude: 1.0, period: 1.0 },
            base: Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]),
        };
        let ev = EvolutionFamily::new(family, 1.0 / 64.0).unwrap();
        let sg = EvolutionSemigroup::new(ev, grid.clone()).unwrap();
        let f = FiberFunction::from_fn(grid.clone(), 2.0, |s| {
            Vector::from_real(&[(2.0 * PI * s).cos(), 1.0 + s * (1.0 - s)])
        })
        .unwrap();
        let (t, r) = (3.0 / 32.0, 7.0 / 32.0);
        let lhs = sg.apply(t + r, &f).unwrap();
        let rhs = sg.apply(t, &sg.apply(r, &f).unwrap()).unwrap();
        let defect = lp_fiber_norm(&lhs.sub(&rhs).unwrap(), None).unwrap();
        assert!(defect <= 1e-9 * lp_fiber_norm(&f, None).unwrap(), "{defect}");
        // A full turn of the circle is a pure index identity.
        let full = sg.apply(1.0, &f).unwrap();
        let direct = f.map_nodes(|i, v| Ok(sg.evolution().evolution_step(grid.nodes()[i], grid.nodes()[i] - 1.0)?.apply(v))).unwrap();
        assert_eq!(full, direct);
    }

    #[test]
    fn autonomous_constant_functions() {
        let grid = circle(16);
        let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);
        let ev = EvolutionFamily::new(TimeFamily::Constant(a.clone()), 1.0 / 32.0).unwrap();
        let sg = EvolutionSemigroup::new(ev, grid.clone()).unwrap();
        let x0 = Vector::from_real(&[0.3, -1.0]);
        let f = FiberFunction::constant(grid, x0.clone(), 2.0).unwrap();
        let t = 5.0 / 16.0;
        let expect = mat_exp(&a, t).unwrap().apply(&x0);
        for v in sg.apply(t, &f).unwrap().values() {
            assert!((v - &expect).norm() < 1e-13);
        }
    }

    #[test]
    fn generator_check_first_order() {
        let errs: Vec<f64> = [64usize, 128, 256, 512]
            .iter()
            .map(|&n| {
                let grid = circle(n);
                let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::real_diag(&[-1.0])), 1.0 / n as f64).unwrap();
                let sg = EvolutionSemigroup::new(ev, grid.clone()).unwrap();
                sg.generator_check(&sine(&grid), None).unwrap()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 1.7, "{errs:?}");
        }
    }

    #[test]
    fn spectral_matches_analytic_derivative() {
        let grid = circle(64);
        let d = spectral_derivative(&sine(&grid)).unwrap();
        for (s, v) in grid.nodes().iter().zip(d.values()) {
            assert!((v[0].re - 2.0 * PI * (2.0 * PI * s).cos()).abs() < 1e-11);
        }
        let step = FiberFunction::from_fn(grid, 2.0, |s| Vector::from_real(&[if s < 0.5 { 1.0 } else { 0.0 }])).unwrap();
        assert!(matches!(spectral_derivative(&step), Err(Error::MissingDerivative(_))));
    }

    #[test]
    fn constant_function_generator_is_family() {
        let grid = circle(64);
        let family = TimeFamily::Scalar(Profile::Cosine { mean: -1.0, amplitude: 0.5, period: 1.0 });
        let ev = EvolutionFamily::new(family, 1.0 / 64.0).unwrap();
        let sg = EvolutionSemigroup::new(ev, grid.clone()).unwrap();
        let f = FiberFunction::constant(grid.clone(), Vector::from_real(&[1.0]), 2.0).unwrap();
        let zero = FiberFunction::zeros(grid, 1, 2.0).unwrap();
        assert!(sg.generator_check(&f, Some(&zero)).unwrap() < 0.05);
    }

    #[test]
    fn semigroup_requires_circle_and_aligned_steps() {
        let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::real_diag(&[-1.0])), 0.3).unwrap();
        assert!(EvolutionSemigroup::new(ev.clone(), circle(10)).is_err());
        let interval = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 5).unwrap());
        assert!(EvolutionSemigroup::new(ev, interval).is_err());
    }

    #[test]
    fn tabulated_family_interpolates() {
        let fam = TimeFamily::Tabulated {
            times: vec![0.0, 1.0],
            matrices: vec![Matrix::real_diag(&[0.0]), Matrix::real_diag(&[-2.0])],
        };
        assert_eq!(fam.eval(0.5).unwrap(), Matrix::real_diag(&[-1.0]));
        assert!(fam.eval(1.5).is_err());
        let ev = EvolutionFamily::new(fam, 0.1).unwrap();
        // Linear in t: exact, U(1,0) = e⁻¹.
        assert!((ev.evolution_step(1.0, 0.0).unwrap()[(0, 0)].re - (-1f64).exp()).abs() < 1e-14);
    }
}
