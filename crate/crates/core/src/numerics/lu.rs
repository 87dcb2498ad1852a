//! LU factorization with partial pivoting and a 1-norm condition estimate.

use super::matrix::{Matrix, Vector, C64};
use crate::error::{Error, Result};

/// Condition numbers above this are treated as singular.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Packed `PA = LU` factorization of a small dense matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    singular: bool,
    norm_one: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Self {
        let d = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..d).collect();
        let mut singular = false;
        for k in 0..d {
            let (p, pivot) = (k..d)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..d {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..d {
                let factor = lu[(i, k)] * inv;
                lu[(i, k)] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..d {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Self { lu, perm, singular, norm_one: a.norm_one() }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A x = b` without any conditioning check.
    fn substitute(&self, b: &[C64]) -> Vec<C64> {
        let d = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..d {
            for j in 0..i {
                let l = self.lu[(i, j)];
                x[i] = x[i] - l * x[j];
            }
        }
        for i in (0..d).rev() {
            for j in i + 1..d {
                let u = self.lu[(i, j)];
                x[i] = x[i] - u * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Explicit inverse, or `None` when a pivot vanished.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.singular {
            return None;
        }
        let d = self.lu.dim();
        let mut inv = Matrix::zeros(d);
        let mut e = vec![C64::new(0.0, 0.0); d];
        for j in 0..d {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            let col = self.substitute(&e);
            for (i, z) in col.into_iter().enumerate() {
                inv[(i, j)] = z;
            }
        }
        inv.is_finite().then_some(inv)
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, computed from the explicit inverse (dimensions are small).
    pub fn condition(&self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm_one * inv.norm_one(),
            None => f64::INFINITY,
        }
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        Vector::new(self.substitute(b.as_slice()))
    }
}

/// Inverse together with its condition estimate, failing above `cap`.
pub fn checked_inverse(a: &Matrix, cap: f64) -> Result<(Matrix, f64)> {
    let lu = Lu::factor(a);
    let inv = lu.inverse();
    let condition = match &inv {
        Some(inv) => a.norm_one() * inv.norm_one(),
        None => f64::INFINITY,
    };
    match inv {
        Some(inv) if condition.is_finite() && condition <= cap => Ok((inv, condition)),
        _ => Err(Error::Singular { condition, cap }),
    }
}

/// Solves `A x = b`, rejecting matrices whose condition estimate exceeds `cap`.
pub fn solve_linear_capped(a: &Matrix, b: &Vector, cap: f64) -> Result<Vector> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let lu = Lu::factor(a);
    let condition = lu.condition();
    if !condition.is_finite() || condition > cap {
        return Err(Error::Singular { condition, cap });
    }
    Ok(lu.solve(b))
}

pub fn solve_linear(a: &Matrix, b: &Vector) -> Result<Vector> {
    solve_linear_capped(a, b, DEFAULT_CONDITION_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Matrix {
        Matrix::from_fn(n, |i, j| C64::new(1.0 / (i + j + 1) as f64, 0.0))
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = Vector::new(vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)]);
        assert_eq!(solve_linear(&Matrix::identity(2), &b).unwrap(), b);
    }

    #[test]
    fn diagonal_solve() {
        let a = Matrix::real_diag(&[2.0, 4.0]);
        let x = solve_linear(&a, &Vector::from_real(&[2.0, 4.0])).unwrap();
        assert_eq!(x, Vector::from_real(&[1.0, 1.0]));
    }

    #[test]
    fn hilbert_multiply_back() {
        let h = hilbert(3);
        let ones = Vector::from_real(&[1.0, 1.0, 1.0]);
        let b = h.apply(&ones);
        let x = solve_linear(&h, &b).unwrap();
        let residual = (&h.apply(&x) - &b).norm();
        assert!(residual <= 1e-10 * b.norm());
        assert!((&x - &ones).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let a = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        match solve_linear(&a, &Vector::from_real(&[1.0, 1.0])) {
            Err(Error::Singular { condition, .. }) => assert!(condition > 1e12),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn ill_conditioned_matrix_hits_cap() {
        let a = Matrix::real_diag(&[1.0, 1e-13]);
        assert!(matches!(
            solve_linear(&a, &Vector::from_real(&[1.0, 1.0])),
            Err(Error::Singular { .. })
        ));
        assert!(solve_linear_capped(&a, &Vector::from_real(&[1.0, 1.0]), 1e14).is_ok());
    }
}
