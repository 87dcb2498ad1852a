//! Induced 2-norm and logarithmic norm from Hermitian eigenvalues.

use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// in ascending order. Only the Hermitian part of `h` is used.
pub fn hermitian_eigenvalues(h: &Matrix) -> Result<Vec<f64>> {
    let d = h.dim();
    let mut a = (h + &h.adjoint()).scale_real(0.5);
    let total = a.norm_frobenius();
    if !total.is_finite() {
        return Err(Error::Range("non-finite matrix in hermitian_eigenvalues".into()));
    }
    let off = |a: &Matrix| {
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    sum += a[(i, j)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > f64::EPSILON * total {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { iterations: sweeps, best: off(&a) });
        }
        sweeps += 1;
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut eig: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// One Jacobi rotation `A ← UᴴAU` annihilating `A[p, q]`. `U` is the phase
/// change making the pivot real followed by a real Givens rotation.
fn rotate(a: &mut Matrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let r = b.norm();
    if r == 0.0 {
        return;
    }
    let phase = b / r; // e^{iφ}
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let d = a.dim();
    let conj_phase = phase.conj();
    for k in 0..d {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * c - y * conj_phase * s;
        a[(k, q)] = x * s + y * conj_phase * c;
    }
    for k in 0..d {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = x * c - y * phase * s;
        a[(q, k)] = x * s + y * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Induced 2-norm `σ_max(A)`, the square root of the top eigenvalue of `AᴴA`.
pub fn op_norm(a: &Matrix) -> Result<f64> {
    let scale = a.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if !scale.is_finite() {
        return Err(Error::Range("non-finite matrix in op_norm".into()));
    }
    // Normalize first so AᴴA cannot overflow.
    let an = a.scale_real(1.0 / scale);
    let top = hermitian_eigenvalues(&(&an.adjoint() * &an))?.last().copied().unwrap_or(0.0);
    Ok(scale * top.max(0.0).sqrt())
}

/// Logarithmic 2-norm `μ₂(A) = λ_max((A + Aᴴ)/2)`; satisfies `‖exp(tA)‖ ≤ exp(t μ₂(A))`.
pub fn log_norm(a: &Matrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(a)?.last().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_norms() {
        assert!((op_norm(&Matrix::identity(3)).unwrap() - 1.0).abs() < 1e-15);
        assert!((op_norm(&Matrix::real_diag(&[1.0, -3.0])).unwrap() - 3.0).abs() < 1e-12);
        let nilpotent = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((op_norm(&nilpotent).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(op_norm(&Matrix::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn jordan_block_norm_closed_form() {
        // ‖[[1,t],[0,1]]‖₂ = t/2 + sqrt(1 + t²/4)
        for &t in &[0.5, 2.0, 10.0] {
            let m = Matrix::from_real_rows(&[&[1.0, t], &[0.0, 1.0]]);
            let expect = t / 2.0 + (1.0 + t * t / 4.0).sqrt();
            assert!((op_norm(&m).unwrap() - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn clustered_top_eigenvalues() {
        let b = Matrix::real_diag(&[1.0, 1.0 - 1e-9, 0.5]);
        let top = *hermitian_eigenvalues(&b).unwrap().last().unwrap();
        assert!((top - 1.0).abs() < 1e-12, "{top}");
        let rot = Matrix::from_real_rows(&[&[0.6, 0.8, 0.0], &[-0.8, 0.6, 0.0], &[0.0, 0.0, 1.0]]);
        let m = &(&rot * &Matrix::real_diag(&[3.0, 3.0 * (1.0 - 1e-10), 1.0])) * &rot.adjoint();
        assert!((op_norm(&m).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_norm_of_normal_matrix_is_spectral_abscissa() {
        let a = Matrix::real_diag(&[-1.0, -2.0, -0.5]);
        assert!((log_norm(&a).unwrap() + 0.5).abs() < 1e-10);
        assert!((log_norm(&Matrix::real_diag(&[-1.0])).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // [[2, i], [−i, 2]] has eigenvalues 1 and 3.
        let h = Matrix::from_row_major(
            2,
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        )
        .unwrap();
        let eig = hermitian_eigenvalues(&h).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-14 && (eig[1] - 3.0).abs() < 1e-14, "{eig:?}");
    }

    #[test]
    fn trace_and_frobenius_preserved() {
        let mut rng = crate::random::seeded(7);
        let a = crate::random::matrix(&mut rng, 6, 1.0);
        let h = (&a + &a.adjoint()).scale_real(0.5);
        let eig = hermitian_eigenvalues(&h).unwrap();
        let trace: f64 = (0..6).map(|i| h[(i, i)].re).sum();
        assert!((eig.iter().sum::<f64>() - trace).abs() < 1e-12);
        let fro2: f64 = eig.iter().map(|x| x * x).sum();
        assert!((fro2 - h.norm_frobenius().powi(2)).abs() < 1e-12 * fro2);
    }
}
