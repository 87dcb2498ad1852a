//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection and the θ thresholds follow Higham's 2005 analysis: the
//! smallest of the degrees 3, 5, 7, 9 whose threshold covers `‖tA‖₁` is used
//! directly, otherwise degree 13 is applied to `tA / 2^s` and squared `s` times.

use super::lu::Lu;
use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Squarings beyond this would only ever produce overflow or garbage.
const MAX_SQUARINGS: i32 = 1100;

/// `exp(tA)`. Returns the identity exactly when `t = 0` or `A = 0`.
pub fn mat_exp(a: &Matrix, t: f64) -> Result<Matrix> {
    if !t.is_finite() || !a.is_finite() {
        return Err(Error::Range("non-finite input to matrix exponential".into()));
    }
    let d = a.dim();
    if t == 0.0 || a.as_slice().iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(Matrix::identity(d));
    }
    let ta = a.scale_real(t);
    let norm = ta.norm_one();
    if !norm.is_finite() {
        return Err(Error::Range(format!("‖tA‖₁ overflows for t = {t}")));
    }

    let result = if norm <= THETA_3 {
        pade_low(&ta, &B3)
    } else if norm <= THETA_5 {
        pade_low(&ta, &B5)
    } else if norm <= THETA_7 {
        pade_low(&ta, &B7)
    } else if norm <= THETA_9 {
        pade_low(&ta, &B9)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        if s > MAX_SQUARINGS {
            return Err(Error::Range(format!("‖tA‖₁ = {norm:e} is out of range")));
        }
        let scaled = ta.scale_real(2f64.powi(-s));
        let mut x = pade13(&scaled)?;
        for _ in 0..s {
            x = &x * &x;
            if !x.is_finite() {
                return Err(Error::Range(format!("exp(tA) overflows for ‖tA‖₁ = {norm:e}")));
            }
        }
        return Ok(x);
    }?;
    if result.is_finite() {
        Ok(result)
    } else {
        Err(Error::Range(format!("exp(tA) overflows for ‖tA‖₁ = {norm:e}")))
    }
}

/// `[m/m]` Padé approximant for `m ∈ {3, 5, 7, 9}` evaluated by powers.
fn pade_low(a: &Matrix, b: &[f64]) -> Result<Matrix> {
    let d = a.dim();
    let a2 = a * a;
    let mut power = Matrix::identity(d); // A^{2k}
    let mut u_inner = Matrix::zeros(d);
    let mut v = Matrix::zeros(d);
    for k in 0..b.len() / 2 {
        u_inner = &u_inner + &power.scale_real(b[2 * k + 1]);
        v = &v + &power.scale_real(b[2 * k]);
        power = &power * &a2;
    }
    let u = a * &u_inner;
    rational(&u, &v)
}

fn pade13(a: &Matrix) -> Result<Matrix> {
    let d = a.dim();
    let id = Matrix::identity(d);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;
    let lincomb = |terms: &[(f64, &Matrix)]| {
        terms.iter().fold(Matrix::zeros(d), |acc, (c, m)| &acc + &m.scale_real(*c))
    };
    let u_high = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_low = lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)]);
    let u = a * &(&(&a6 * &u_high) + &u_low);
    let v_high = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_low = lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]);
    let v = &(&a6 * &v_high) + &v_low;
    rational(&u, &v)
}

/// Solves `(V - U) X = V + U` column by column.
fn rational(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    let d = u.dim();
    let q = v - u;
    let p = v + u;
    let lu = Lu::factor(&q);
    if lu.is_singular() {
        return Err(Error::Range("Padé denominator is singular".into()));
    }
    let mut x = Matrix::zeros(d);
    for j in 0..d {
        let col = super::matrix::Vector::new((0..d).map(|i| p[(i, j)]).collect());
        let sol = lu.solve(&col);
        for i in 0..d {
            x[(i, j)] = sol[i];
        }
    }
    Ok(x)
}
