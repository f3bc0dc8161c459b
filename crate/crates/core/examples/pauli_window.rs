//! Numeric MLSI of the Pauli pair `L = [X/2,[X/2,·]] + [Y/2,[Y/2,·]]`.
//!
//! The infimum is exactly 2, so the estimate should land just above it.

use clsi::estimator::{mlsi_estimate, EstimateOptions};
use clsi::lindblad::pauli_system;
use clsi::ConditionalExpectation;

fn main() -> clsi::Result<()> {
    let s = pauli_system();
    let opts = EstimateOptions { restarts: 200, seed: 7, ..Default::default() };
    let report = mlsi_estimate(&s, &ConditionalExpectation::Trace { n: 2 }, &opts)?.labeled("pauli");
    println!("spectral gap  {}", s.spectral_gap()?);
    println!("estimate      {:.12}", report.value);
    println!("2 * gap       {:.12}", report.gap_upper.unwrap_or(f64::NAN));
    println!("fisher/entropy at witness: {:.6e} / {:.6e}", report.fisher, report.entropy);
    Ok(())
}
