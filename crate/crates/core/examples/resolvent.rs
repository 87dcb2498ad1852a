// Multiplication operator, its resolvent, the approximate identity
// `λR(λ)f → f` and domain probing on growing truncations.

use std::sync::Arc;

use lpfiber::bundle::{build_bundle, FamilySpec, NormMode, Profile};
use lpfiber::grid::GridMeasure;
use lpfiber::multiplication::{domain_membership, MultOperator};
use lpfiber::numerics::{Matrix, Vector, C64};
use lpfiber::space::{lp_fiber_norm, FiberFunction};

pub fn run_example() -> lpfiber::Result<()> {
    let grid = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 33)?);
    let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);
    let bundle = Arc::new(build_bundle(&FamilySpec::Constant(a), grid.clone())?);
    let op = MultOperator::new(bundle, 2.0)?;

    let f = FiberFunction::from_fn(grid, 2.0, |s| Vector::from_real(&[s.cos(), 1.0 - s]))?;
    let lambda = C64::new(1.0, 2.0);
    let g = op.resolvent_apply(lambda, &f)?;
    let back = g.scale(lambda).sub(&op.apply(&g)?)?;
    println!("‖(λ − 𝓜)R(λ)f − f‖ = {:.3e}", lp_fiber_norm(&back.sub(&f)?.with_mode(NormMode::Base), None)?);

    let lambdas = [10.0, 100.0, 1000.0];
    for (l, e) in lambdas.iter().zip(op.resolvent_approx_identity(&f, &lambdas)?) {
        println!("λ = {l:>6}: ‖λR(λ)f − f‖ = {e:.4e}");
    }

    // m(s) = −(1 + s)² on [0, R]
    let family = FamilySpec::ScalarProfile(Profile::Polynomial { coeffs: vec![-1.0, -2.0, -1.0] });
    let probes: Vec<GridMeasure> = [1.0f64, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&r| GridMeasure::uniform_interval(0.0, r, (64.0 * r) as usize + 1))
        .collect::<lpfiber::Result<_>>()?;
    for (label, power) in [("(1+s)^-1", -1), ("(1+s)^-3", -3)] {
        let v = domain_membership(&family, |s| Vector::from_real(&[(1.0 + s).powi(power)]), &probes, 2.0)?;
        println!("f = {label}: member = {}, ‖𝓜f‖ on truncations = {:.4?}", v.member, v.norm_sequence);
    }
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
