//! Seeded random matrices for property batteries and optimizer restarts.
//!
//! Everything is driven by `ChaCha8Rng` so streams are stable across platforms
//! and releases of `rand`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::entropy::State;
use crate::matfun::hermitian::c;
use crate::matfun::{CMat, HermitianMatrix};

pub type Rand = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut Rand) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut Rand, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| Complex64::new(gauss(rng), gauss(rng)))
}

/// GUE-like Hermitian matrix with entries of size `scale`.
pub fn random_hermitian(rng: &mut Rand, n: usize, scale: f64) -> HermitianMatrix {
    let g = random_complex(rng, n, n);
    HermitianMatrix::symmetrized(g * c(scale / 2f64.sqrt()))
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut Rand, n: usize) -> CMat {
    let g = random_complex(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phase ambiguity of the QR factor
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm()) } else { c(1.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Positive definite matrix with spectrum drawn uniformly from `[lo, hi]`.
pub fn random_positive(rng: &mut Rand, n: usize, lo: f64, hi: f64) -> HermitianMatrix {
    let u = random_unitary(rng, n);
    let d = CMat::from_fn(n, n, |i, j| if i == j { c(rng.random_range(lo..=hi)) } else { c(0.0) });
    HermitianMatrix::symmetrized(&u * d * u.adjoint())
}

/// Normalized state `n·exp(H)/tr exp(H)` for a random Hermitian `H`.
pub fn random_state(rng: &mut Rand, n: usize, scale: f64) -> State {
    let h = random_hermitian(rng, n, scale);
    State::from_log(&h)
}

/// Kraus operators of a random trace-preserving completely positive map.
pub fn random_kraus(rng: &mut Rand, n: usize, count: usize) -> Vec<CMat> {
    let raw: Vec<CMat> = (0..count).map(|_| random_complex(rng, n, n)).collect();
    let s = raw.iter().fold(CMat::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    let s = HermitianMatrix::symmetrized(s);
    let inv_sqrt = s.eig().reconstruct(|x| 1.0 / x.sqrt());
    raw.into_iter().map(|k| k * inv_sqrt.as_mat()).collect()
}

pub fn uniform(rng: &mut Rand, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn normal_vec(rng: &mut Rand, len: usize) -> Vec<f64> {
    (0..len).map(|_| gauss(rng)).collect()
}
