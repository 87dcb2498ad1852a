//! Multiplication semigroups `(𝒯(t)f)(s) = exp(tM(s)) f(s)`.

use std::sync::Arc;

use crate::bundle::{FiberBundle, NormMode, StabilityType};
use crate::error::{Error, Result};
use crate::multiplication::MultOperator;
use crate::numerics::{mat_exp, op_norm, Matrix, C64};
use crate::space::{lp_fiber_norm, FiberFunction};

#[derive(Clone, Debug)]
pub struct MultSemigroup {
    bundle: Arc<FiberBundle>,
    stability: StabilityType,
}

impl MultSemigroup {
    /// Uses the bundle's claimed type unless one is given here.
    pub fn new(bundle: Arc<FiberBundle>, stability: Option<StabilityType>) -> Result<Self> {
        let stability = stability.unwrap_or_else(|| bundle.stability());
        if !(stability.m >= 1.0) || !stability.omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "semigroup type needs M ≥ 1 and finite ω, got ({}, {})",
                stability.m, stability.omega
            )));
        }
        Ok(Self { bundle, stability })
    }

    pub fn bundle(&self) -> &Arc<FiberBundle> {
        &self.bundle
    }

    pub fn stability(&self) -> StabilityType {
        self.stability
    }

    /// `exp(tM(s))` at every node.
    pub fn propagators(&self, t: f64) -> Result<Vec<Matrix>> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("semigroup time t = {t} must be nonnegative")));
        }
        self.bundle.operators().iter().map(|m| mat_exp(m, t)).collect()
    }

    pub fn apply(&self, t: f64, f: &FiberFunction) -> Result<FiberFunction> {
        let props = self.propagators(t)?;
        apply_propagators(&props, f)
    }

    /// Fits `log max_s ‖exp(tM(s))‖ ≈ log M̂ + ω̂ t` by least squares over
    /// `times`. The slope is the fitted ω̂; `M̂` is the smallest constant with
    /// `max_s ‖exp(tM(s))‖ ≤ M̂ e^{ω̂t}` at every sampled time.
    pub fn growth_bound_estimate(&self, times: &[f64]) -> Result<(f64, f64)> {
        if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
            return Err(Error::InvalidArgument("growth fit needs ≥ 2 increasing positive times".into()));
        }
        let mut logs = Vec::with_capacity(times.len());
        for &t in times {
            let mut peak = 0.0f64;
            for e in self.propagators(t)? {
                peak = peak.max(op_norm(&e)?);
            }
            logs.push(peak.ln());
        }
        let n = times.len() as f64;
        let tm = times.iter().sum::<f64>() / n;
        let ym = logs.iter().sum::<f64>() / n;
        let sxy: f64 = times.iter().zip(&logs).map(|(t, y)| (t - tm) * (y - ym)).sum();
        let sxx: f64 = times.iter().map(|t| (t - tm) * (t - tm)).sum();
        let omega = sxy / sxx;
        let log_m = times.iter().zip(&logs).map(|(t, y)| y - omega * t).fold(f64::NEG_INFINITY, f64::max);
        Ok((log_m.exp(), omega))
    }

    /// `e_h = ‖(𝒯(h)f − f)/h − 𝓜f‖` for each `h`.
    pub fn generator_fd_check(&self, f: &FiberFunction, hs: &[f64]) -> Result<Vec<f64>> {
        let op = MultOperator::new(self.bundle.clone(), f.p())?;
        let mf = op.apply(f)?;
        hs.iter()
            .map(|&h| {
                if !(h > 0.0) {
                    return Err(Error::InvalidArgument(format!("step h = {h} must be positive")));
                }
                let quotient = self.apply(h, f)?.sub(f)?.scale(C64::new(1.0 / h, 0.0));
                let diff = quotient.with_mode(NormMode::Base).sub(&mf)?;
                lp_fiber_norm(&diff, None)
            })
            .collect()
    }

    /// `‖∫₀^T e^{−λt} 𝒯(t)f dt − R(λ, 𝓜)f‖` with the integral taken by the
    /// trapezoid rule on `steps` uniform panels.
    pub fn laplace_resolvent_defect(&self, lambda: f64, f: &FiberFunction, horizon: f64, steps: usize) -> Result<f64> {
        if steps == 0 || !(horizon > 0.0) {
            return Err(Error::InvalidArgument("laplace quadrature needs steps > 0 and T > 0".into()));
        }
        let dt = horizon / steps as f64;
        let step = self.propagators(dt)?;
        let decay = (-lambda * dt).exp();
        let mut current = f.with_mode(NormMode::Base);
        let mut weight = 1.0;
        let mut acc = current.scale(C64::new(0.5 * dt, 0.0));
        for k in 1..=steps {
            current = apply_propagators(&step, &current)?;
            weight *= decay;
            let w = if k == steps { 0.5 * dt * weight } else { dt * weight };
            acc = acc.add(&current.scale(C64::new(w, 0.0)))?;
        }
        let op = MultOperator::new(self.bundle.clone(), f.p())?;
        let resolvent = op.resolvent_apply(C64::new(lambda, 0.0), &f.with_mode(NormMode::Base))?;
        lp_fiber_norm(&acc.sub(&resolvent)?, None)
    }
}

pub(crate) fn apply_propagators(props: &[Matrix], f: &FiberFunction) -> Result<FiberFunction> {
    if props.len() != f.values().len() {
        return Err(Error::DimensionMismatch { expected: props.len(), found: f.values().len() });
    }
    if let Some(p) = props.first() {
        if p.dim() != f.dim() {
            return Err(Error::DimensionMismatch { expected: p.dim(), found: f.dim() });
        }
    }
    f.map_nodes(|i, v| Ok(props[i].apply(v)))
}
