//! Quadrature cross-checks for the double operator integral kernels.
//!
//! These evaluate the integral representations directly (resolvent inverses and
//! fractional powers), so they share no code path with [`super::kernel`].

use std::f64::consts::{FRAC_PI_2, PI};

use super::hermitian::{c, CMat, HermitianMatrix, POSITIVITY_FLOOR};
use crate::{Error, Result};

/// Refinement stops once successive estimates agree to this (relative) level.
pub const REFINE_TOL: f64 = 1e-8;
/// Still-disagreeing refinements above this level at the point cap are errors.
pub const FAIL_TOL: f64 = 1e-6;
pub const MAX_POINTS: usize = 512;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrate a matrix-valued function over `[a, b]` with `n`-point Gauss–Legendre.
pub fn integrate_matrix<F: Fn(f64) -> CMat>(a: f64, b: f64, n: usize, f: F) -> CMat {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut acc: Option<CMat> = None;
    for (xi, wi) in x.iter().zip(&w) {
        let v = f(mid + half * xi) * c(wi * half);
        acc = Some(match acc {
            Some(a) => a + v,
            None => v,
        });
    }
    acc.expect("n >= 1")
}

pub fn integrate_scalar<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter().zip(&w).map(|(xi, wi)| wi * half * f(mid + half * xi)).sum()
}

fn refine<F: Fn(usize) -> CMat>(points: usize, estimate: F) -> Result<CMat> {
    let mut n = points.clamp(1, MAX_POINTS);
    let mut prev = estimate(n);
    loop {
        if n >= MAX_POINTS {
            return Ok(prev);
        }
        let next_n = (2 * n).min(MAX_POINTS);
        let next = estimate(next_n);
        let diff = (&next - &prev).norm() / next.norm().max(1.0);
        if diff < REFINE_TOL {
            return Ok(next);
        }
        if next_n >= MAX_POINTS && diff > FAIL_TOL {
            return Err(Error::Quadrature(diff));
        }
        prev = next;
        n = next_n;
    }
}

fn check_positive(rho: &HermitianMatrix) -> Result<()> {
    let m = rho.min_eigenvalue();
    if m <= POSITIVITY_FLOOR {
        return Err(Error::Domain(m));
    }
    Ok(())
}

/// `∫_0^∞ (ρ+r)^{-1} T (ρ+r)^{-1} dr` with `r = tan θ`.
pub fn quadrature_oracle_resolvent(rho: &HermitianMatrix, t: &CMat, points: usize) -> Result<CMat> {
    check_positive(rho)?;
    let n = rho.dim();
    let id = CMat::identity(n, n);
    refine(points, |np| {
        integrate_matrix(0.0, FRAC_PI_2, np, |theta| {
            let r = theta.tan();
            let sec2 = 1.0 / theta.cos().powi(2);
            let inv = (rho.as_mat() + &id * c(r)).try_inverse().expect("ρ + r is invertible for ρ > 0");
            &inv * t * &inv * c(sec2)
        })
    })
}

/// `∫_0^1 ρ^r T ρ^{1−r} dr`.
pub fn quadrature_oracle_tilt(rho: &HermitianMatrix, t: &CMat, points: usize) -> Result<CMat> {
    check_positive(rho)?;
    let e = rho.eig();
    refine(points, |np| {
        integrate_matrix(0.0, 1.0, np, |r| {
            let a = e.reconstruct(|x| x.powf(r));
            let b = e.reconstruct(|x| x.powf(1.0 - r));
            a.as_mat() * t * b.as_mat()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::kernel::{doi_apply, ScalarKernel};
    use crate::rng::{random_hermitian, random_positive, seeded};

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
        assert!((integrate_scalar(0.0, 1.0, 5, |t| t.powi(3)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn resolvent_identity() {
        let id = HermitianMatrix::identity(2);
        let out = quadrature_oracle_resolvent(&id, id.as_mat(), 64).unwrap();
        assert!((out - id.as_mat()).norm() < 1e-10);
    }

    #[test]
    fn resolvent_closed_form_off_diagonal() {
        let rho = HermitianMatrix::diag(&[1.0, 4.0]);
        let x = CMat::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)]);
        let out = quadrature_oracle_resolvent(&rho, &x, 64).unwrap();
        assert!((out[(0, 1)].re - 0.462098120373297).abs() < 1e-9);
    }

    #[test]
    fn tilt_identity_and_diagonal() {
        let mut rng = seeded(9);
        let t = random_hermitian(&mut rng, 3, 1.0);
        let out = quadrature_oracle_tilt(&HermitianMatrix::identity(3), t.as_mat(), 64).unwrap();
        assert!((out - t.as_mat()).norm() < 1e-12);
        let lam = [0.5, 2.0, 7.0];
        let out = quadrature_oracle_tilt(&HermitianMatrix::diag(&lam), t.as_mat(), 64).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let k = if i == j { lam[i] } else { (lam[i] - lam[j]) / (lam[i].ln() - lam[j].ln()) };
                assert!((out[(i, j)] - t.as_mat()[(i, j)] * c(k)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn oracles_match_kernels_on_random_inputs() {
        let mut rng = seeded(21);
        for _ in 0..5 {
            let rho = random_positive(&mut rng, 3, 0.05, 20.0);
            let t = random_hermitian(&mut rng, 3, 1.0);
            let q = quadrature_oracle_resolvent(&rho, t.as_mat(), 64).unwrap();
            let k = doi_apply(&rho, &rho, &ScalarKernel::LogQuotient, t.as_mat()).unwrap();
            assert!((&q - &k).norm() < 1e-6 * k.norm().max(1.0));
            let q = quadrature_oracle_tilt(&rho, t.as_mat(), 64).unwrap();
            let k = doi_apply(&rho, &rho, &ScalarKernel::Tilt, t.as_mat()).unwrap();
            assert!((&q - &k).norm() < 1e-6 * k.norm().max(1.0));
        }
    }

    #[test]
    fn rejects_singular_input() {
        let rho = HermitianMatrix::diag(&[1.0, 0.0]);
        assert!(quadrature_oracle_resolvent(&rho, rho.as_mat(), 16).is_err());
    }
}
