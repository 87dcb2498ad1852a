// Builds a matrix-profile bundle, evaluates extrapolation norms and runs the
// bundle validation checks.

use std::sync::Arc;

use lpfiber::bundle::{build_bundle, validate_bundle, FamilySpec, LatticeSet, NormMode};
use lpfiber::grid::GridMeasure;
use lpfiber::numerics::{Matrix, Vector};

pub fn run_example() -> lpfiber::Result<()> {
    let grid = Arc::new(GridMeasure::uniform_interval(0.0, 1.0, 9)?);
    // M(s) = C₀ + s C₁
    let c0 = Matrix::from_real_rows(&[&[-2.0, 0.5], &[0.0, -1.0]]);
    let c1 = Matrix::from_real_rows(&[&[0.0, 0.0], &[1.0, -1.0]]);
    let bundle = build_bundle(&FamilySpec::MatrixProfile(vec![c0, c1]), grid)?;

    let x = Vector::from_real(&[1.0, -1.0]);
    for node in [0, 4, 8] {
        let s = bundle.grid().nodes()[node];
        println!(
            "s = {s:.3}: ‖x‖ = {:.4}, ‖x‖₋₁ = ‖M(s)⁻¹x‖ = {:.4}, cond = {:.2}",
            bundle.fiber_norm(node, &x, NormMode::Base)?,
            bundle.fiber_norm(node, &x, NormMode::Extrapolation)?,
            bundle.conditions()[node]
        );
    }
    let st = bundle.stability();
    println!("claimed type (M, ω) = ({}, {:.4})", st.m, st.omega);

    let lattice = LatticeSet::new(2, 4);
    let snapped = lattice.snap(&(&x + &Vector::from_real(&[1.0 / 3.0, 0.0])));
    let parts: Vec<String> = snapped.as_slice().iter().map(|z| format!("{}", z)).collect();
    println!("x + (1/3, 0) snapped to level 4: ({})", parts.join(", "));

    let report = validate_bundle(&bundle, 0, 100);
    println!("validation: {} checks, {} failed", report.summary.total, report.summary.failed);
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
