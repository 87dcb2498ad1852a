//! Seeded generators for the random test corpora.
//!
//! All randomness goes through [`Rng`], a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Draw order is part of the report
//! determinism contract, so helpers here consume the stream in a fixed order.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{checked_inverse, Matrix, Vector, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a named sub-corpus.
pub fn substream(seed: u64, label: &str) -> Rng {
    // FNV-1a over the label, mixed into the seed.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    seeded(seed ^ h)
}

pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub fn complex(rng: &mut Rng, scale: f64) -> C64 {
    let re = rng.gen_range(-1.0..1.0);
    let im = rng.gen_range(-1.0..1.0);
    C64::new(re * scale, im * scale)
}

pub fn vector(rng: &mut Rng, dim: usize, scale: f64) -> Vector {
    Vector::new((0..dim).map(|_| complex(rng, scale)).collect())
}

pub fn matrix(rng: &mut Rng, dim: usize, scale: f64) -> Matrix {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = complex(rng, scale);
        }
    }
    m
}

/// `-(1 + u) I + R` with a small random perturbation `R`; always invertible
/// and dissipative (`‖R‖₂ ≤ ‖R‖_F < 1`).
pub fn stable_matrix(rng: &mut Rng, dim: usize) -> Matrix {
    let shift = 1.0 + rng.gen_range(0.0..2.0);
    let r = matrix(rng, dim, 0.5 / dim as f64);
    r.shift(C64::new(-shift, 0.0))
}

/// Random matrix with `‖A‖₁‖A⁻¹‖₁ ≤ max_condition`, by rejection.
pub fn conditioned_matrix(rng: &mut Rng, dim: usize, max_condition: f64) -> Matrix {
    loop {
        let a = matrix(rng, dim, 1.0);
        if checked_inverse(&a, max_condition).is_ok() {
            return a;
        }
    }
}

pub fn random_subset(rng: &mut Rng, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}
