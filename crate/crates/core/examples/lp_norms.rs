// L^p fiber norms in base and extrapolation mode, and dyadic simple-function
// approximation.

use std::sync::Arc;

use lpfiber::bundle::{build_bundle, FamilySpec, NormMode, Profile};
use lpfiber::grid::GridMeasure;
use lpfiber::numerics::Vector;
use lpfiber::space::{lp_fiber_norm, simple_approximation, simple_approximation_bound, FiberFunction};

pub fn run_example() -> lpfiber::Result<()> {
    let grid = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 65)?);
    // m(s) = −(1 + s)
    let bundle = build_bundle(&FamilySpec::ScalarProfile(Profile::Polynomial { coeffs: vec![-1.0, -1.0] }), grid.clone())?;

    for p in [1.0, 2.0, 3.0] {
        let f = FiberFunction::from_fn(grid.clone(), p, |s| Vector::from_real(&[1.0 + s]))?;
        let base = lp_fiber_norm(&f, None)?;
        // ‖f‖₋₁ = ‖f/m‖ = ‖1‖ = 1
        let ext = lp_fiber_norm(&f.with_mode(NormMode::Extrapolation), Some(&bundle))?;
        println!("p = {p}: ‖1 + s‖_p = {base:.6}, ‖1 + s‖₋₁,p = {ext:.6}");
    }

    let f = FiberFunction::from_fn(grid, 2.0, |s| Vector::from_real(&[(3.0 * s).sin(), s * s]))?;
    println!("  k    parts   error        bound");
    for k in [2, 4, 8, 12] {
        let (simple, err) = simple_approximation(&f, k, None)?;
        let bound = simple_approximation_bound(2, k, None)?;
        println!("{k:>3} {:>8}   {err:.3e}   {bound:.3e}", simple.parts.len());
    }
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
