//! Divided-difference kernels applied in the eigenbasis of `ρ`, checked
//! against the derivation identity and the integral representations.

use clsi::matfun::{commutator, doi_apply, log, quadrature_oracle_tilt, DoubleOperatorIntegral};
use clsi::rng::{random_complex, random_hermitian, random_positive, seeded};
use clsi::{CMat, ScalarKernel};

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn main() -> clsi::Result<()> {
    let mut rng = seeded(11);
    let rho = random_positive(&mut rng, 4, 0.1, 5.0);
    let x = random_hermitian(&mut rng, 4, 1.0);

    // [X, ln ρ] = Q^ρ_log([X, ρ])
    let lhs = commutator(x.as_mat(), log(&rho)?.as_mat());
    let rhs = doi_apply(&rho, &rho, &ScalarKernel::LogQuotient, &commutator(x.as_mat(), rho.as_mat()))?;
    println!("derivation identity residual {:.3e}", max_abs(&(lhs - rhs)));

    let t = random_complex(&mut rng, 4, 4);
    let tilt = DoubleOperatorIntegral::new(&rho, &rho, &ScalarKernel::Tilt)?;
    let quad = quadrature_oracle_tilt(&rho, &t, 64)?;
    println!("tilt vs quadrature {:.3e}", max_abs(&(tilt.apply(&t) - quad)));

    let sqrt_mean = ScalarKernel::custom("sqrt-mean", |a, b| (a.sqrt() + b.sqrt()).powi(2) / 4.0, |a| a);
    let q = doi_apply(&rho, &rho, &sqrt_mean, x.as_mat())?;
    println!("custom kernel keeps hermiticity: {:.3e}", max_abs(&(&q - q.adjoint())));
    Ok(())
}
