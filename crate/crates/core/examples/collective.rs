//! Amplified estimates: `S ⊗ id_{M_m}` and the collective Lindbladian on copies.

use clsi::estimator::{clsi_probe, mlsi_estimate, EstimateOptions};
use clsi::lindblad::{collective_lindblad, fixed_point_dim, integer_spectrum_lindblad};
use clsi::HermitianMatrix;

fn main() -> clsi::Result<()> {
    let x = HermitianMatrix::diag(&[0.0, 1.0, 3.0]);
    let l = integer_spectrum_lindblad(&x)?;
    let e = fixed_point_dim(&l.superoperator).expectation;
    let opts = EstimateOptions { restarts: 24, seed: 5, ..Default::default() };
    let base = mlsi_estimate(&l.superoperator, &e, &opts)?;
    let amplified = clsi_probe(&l.superoperator, &e, 2, &opts)?;
    println!("certified {:.6}", l.certified_bound);
    println!("m=1 estimate {:.6}", base.value);
    println!("m=2 estimate {:.6}", amplified.value);

    let two = collective_lindblad(&[HermitianMatrix::diag(&[0.0, 1.0])], 2)?;
    println!("collective: dim {} kernel {}", two.dim(), fixed_point_dim(&two).dim);
    Ok(())
}
