// Extrapolated functions `f = 𝓜₋₁g`, the identification round trip and the
// constant-fiber case.

use std::sync::Arc;

use lpfiber::bundle::{build_bundle, FamilySpec, Profile};
use lpfiber::extrapolation::{
    constant_fiber_corollary_check, extrapolated_apply, extrapolated_semigroup_apply, identify_extrapolation,
};
use lpfiber::grid::GridMeasure;
use lpfiber::numerics::{Matrix, Vector};
use lpfiber::random;
use lpfiber::space::{lp_fiber_norm, FiberFunction};

pub fn run_example() -> lpfiber::Result<()> {
    let grid = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 17)?);
    let spec = FamilySpec::ScalarProfile(Profile::Cosine { mean: -2.0, amplitude: 0.5, period: 1.0 });
    let bundle = Arc::new(build_bundle(&spec, grid.clone())?);

    let g = FiberFunction::from_fn(grid.clone(), 2.0, |s| Vector::from_real(&[1.0 + s * s]))?;
    let f = extrapolated_apply(&bundle, &g)?;
    println!("‖𝓜₋₁g‖₋₁ = {:.12}, ‖g‖ = {:.12}", lp_fiber_norm(&f.value, Some(&bundle))?, lp_fiber_norm(&g, None)?);

    let (pre, report) = identify_extrapolation(&bundle, &f.value)?;
    println!(
        "identify: isometry defect {:.2e}, reconstruction defect {:.2e}, preimage matches g: {}",
        report.isometry_defect,
        report.reconstruction_defect,
        pre.values().iter().zip(g.values()).all(|(a, b)| (a - b).norm() < 1e-14)
    );

    let moved = extrapolated_semigroup_apply(&bundle, 0.5, &f)?;
    if let Some((pointwise, gap)) = moved.witness_defects(&bundle)? {
        println!("𝒮(0.5)f against 𝓜₋₁𝒯(0.5)g: pointwise {pointwise:.2e}, norm gap {gap:.2e}");
    }

    let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);
    let mut rng = random::seeded(0);
    let c = constant_fiber_corollary_check(&a, grid, 50, 2.0, &mut rng)?;
    println!("M ≡ A: max relative gap over {} samples = {:.2e}", c.samples, c.max_defect);
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
