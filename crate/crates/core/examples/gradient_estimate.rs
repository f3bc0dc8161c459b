//! `‖∇P_t a‖²_ρ ≤ e^{−2λt} ‖∇a‖²_{P_t ρ}` for the Pauli pair, at the true
//! rate and at an inflated one.

use clsi::lindblad::{gradient_estimate_check, pauli_matrices};
use clsi::rng::{random_hermitian, random_state, seeded};
use clsi::HermitianMatrix;
use num_complex::Complex64;

fn main() -> clsi::Result<()> {
    let [x, y, _] = pauli_matrices();
    let half = Complex64::new(0.5, 0.0);
    let gens = [HermitianMatrix::new(x * half)?, HermitianMatrix::new(y * half)?];
    let mut rng = seeded(2);
    let rho = random_state(&mut rng, 2, 1.0);
    let a = random_hermitian(&mut rng, 2, 1.0);
    for lambda in [1.0, 5.0] {
        let r = gradient_estimate_check(&gens, lambda, &rho, &a, &[0.1, 0.5, 1.0])?;
        println!("lambda={lambda}: passed={} max residual {:.3e}", r.passed, r.max_residual);
        for row in &r.rows {
            println!("  t={:<4} lhs={:.6e} rhs={:.6e}", row.t, row.lhs, row.rhs);
        }
    }
    Ok(())
}
