// Dense complex kernels: matrix exponential, LU solves and norms.

use lpfiber::numerics::{checked_inverse, log_norm, mat_exp, op_norm, solve_linear, Matrix, Vector};

pub fn run_example() -> lpfiber::Result<()> {
    let a = Matrix::from_real_rows(&[&[-1.0, 1.0], &[0.0, -2.0]]);

    // exp(ln2·A) = [[1/2, 1/4], [0, 1/4]]
    let e = mat_exp(&a, 2f64.ln())?;
    println!("exp(ln2 A) = [[{:.6}, {:.6}], [{:.6}, {:.6}]]", e[(0, 0)].re, e[(0, 1)].re, e[(1, 0)].re, e[(1, 1)].re);

    let (inv, cond) = checked_inverse(&a, 1e12)?;
    println!("cond_1(A) = {cond:.3}, A⁻¹[0][1] = {:.3}", inv[(0, 1)].re);

    let x = solve_linear(&a, &Vector::from_real(&[1.0, 1.0]))?;
    println!("A x = (1, 1): x = ({:.3}, {:.3})", x[0].re, x[1].re);

    println!("‖A‖₂ = {:.6}, μ₂(A) = {:.6}", op_norm(&a)?, log_norm(&a)?);
    for t in [0.5, 1.0, 2.0] {
        println!("  ‖exp({t}A)‖₂ = {:.6} ≤ e^(tμ) = {:.6}", op_norm(&mat_exp(&a, t)?)?, (t * log_norm(&a)?).exp());
    }
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
