// Non-autonomous evolution: the exponential-midpoint family `U(t, s)` and
// the evolution semigroup on a circle.

use std::f64::consts::PI;
use std::sync::Arc;

use lpfiber::bundle::Profile;
use lpfiber::evolution::{write_trajectory_csv, EvolutionFamily, EvolutionSemigroup, TimeFamily};
use lpfiber::grid::GridMeasure;
use lpfiber::numerics::{Matrix, Vector};
use lpfiber::space::FiberFunction;

pub fn run_example() -> lpfiber::Result<()> {
    // a(t) = −3t², U(1, 0) = e⁻¹; the midpoint substeps converge at order 2.
    let profile = Profile::Polynomial { coeffs: vec![0.0, 0.0, -3.0] };
    let mut previous: Option<f64> = None;
    for k in 1..=5 {
        let h = 2f64.powi(-k);
        let u = EvolutionFamily::new(TimeFamily::Scalar(profile.clone()), h)?.evolution_step(1.0, 0.0)?;
        let err = (u[(0, 0)].re - (-1.0f64).exp()).abs();
        let ratio = previous.map(|p| format!("{:.3}", p / err)).unwrap_or_else(|| "-".into());
        println!("h = {h:<8} |U(1,0) − e⁻¹| = {err:.4e}  ratio {ratio}");
        previous = Some(err);
    }

    let n = 16;
    let grid = Arc::new(GridMeasure::circle(1.0, n)?);
    let ev = EvolutionFamily::new(TimeFamily::Constant(Matrix::real_diag(&[-1.0])), 1.0 / n as f64)?;
    let es = EvolutionSemigroup::new(ev, grid.clone())?;
    let f = FiberFunction::from_fn(grid.clone(), 2.0, |s| Vector::from_real(&[(2.0 * PI * s).sin()]))?;
    let df = FiberFunction::from_fn(grid, 2.0, |s| Vector::from_real(&[2.0 * PI * (2.0 * PI * s).cos()]))?;
    println!("generator check at N = {n}: {:.4e}", es.generator_check(&f, Some(&df))?);

    let trajectory = es.trajectory(&f, 4.0 / n as f64, 2)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &trajectory)?;
    let text = String::from_utf8_lossy(&csv);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    println!("... {} rows", text.lines().count() - 1);
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
