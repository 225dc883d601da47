//! Seeded random matrices: Gaussian entries, Haar-like unitaries and
//! conjugators with a prescribed condition number.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matcore::{orthonormalize, CMatrix, C64};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal sample (Box-Muller).
pub fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let th = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * th.cos(), r * th.sin())
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    orthonormalize(&random_matrix(rng, n))
}

/// Uniform sample from the disc of radius `radius`.
pub fn point_in_disc<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    C64::from_polar(r, th)
}

/// `U diag(d) V` with singular values log-spaced in `[1, cond]`, so the
/// result has condition number exactly `cond` (up to roundoff).
pub fn conditioned_matrix<R: Rng>(rng: &mut R, n: usize, cond: f64) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let d: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                cond.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    &(&u * &CMatrix::from_real_diag(&d)) * &v
}
