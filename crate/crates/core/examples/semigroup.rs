// Multiplication semigroup `exp(tM(s))`: semigroup law, growth-bound fit and
// the finite-difference generator check with its convergence table.

use std::sync::Arc;

use lpfiber::bundle::{build_bundle, FamilySpec, NormMode};
use lpfiber::grid::GridMeasure;
use lpfiber::numerics::{Matrix, Vector};
use lpfiber::report::convergence_table;
use lpfiber::semigroup::MultSemigroup;
use lpfiber::space::{lp_fiber_norm, FiberFunction};

pub fn run_example() -> lpfiber::Result<()> {
    let grid = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 33)?);
    let c0 = Matrix::from_real_rows(&[&[-1.0, 2.0], &[0.0, -1.5]]);
    let c1 = Matrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 0.5]]);
    let bundle = Arc::new(build_bundle(&FamilySpec::MatrixProfile(vec![c0, c1]), grid.clone())?);
    let sg = MultSemigroup::new(bundle, None)?;

    let f = FiberFunction::from_fn(grid, 2.0, |s| Vector::from_real(&[1.0, s]))?;
    let joint = sg.apply(1.25, &f)?;
    let split = sg.apply(0.5, &sg.apply(0.75, &f)?)?;
    println!("‖𝒯(1.25)f − 𝒯(0.5)𝒯(0.75)f‖ = {:.3e}", lp_fiber_norm(&joint.sub(&split)?.with_mode(NormMode::Base), None)?);

    let (m, omega) = sg.growth_bound_estimate(&[0.25, 0.5, 1.0, 2.0, 4.0])?;
    println!("fitted type (M̂, ω̂) = ({m:.4}, {omega:.4}), claimed ω = {:.4}", sg.stability().omega);

    let hs: Vec<f64> = (3..=10).map(|k| 2f64.powi(-k)).collect();
    let errors = sg.generator_fd_check(&f, &hs)?;
    println!("        h         error   order");
    for row in convergence_table(&hs, &errors) {
        let order = row.observed_order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        println!("{:>9.3e}  {:>12.4e}  {order:>6}", row.h, row.error);
    }
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
