//! Relative entropy to the fixed points along the semigroup, as CSV.

use clsi::entropy::State;
use clsi::estimator::decay_curve;
use clsi::lindblad::{graph_lindblad, pauli_system};
use clsi::rng::{random_state, seeded};
use clsi::{ConditionalExpectation, HermitianMatrix, WeightedGraph};

fn main() -> clsi::Result<()> {
    let grid: Vec<f64> = (0..=10).map(|k| 0.2 * k as f64).collect();

    // a Z-polarized qubit decays at rate 4 in the long run
    let rho = State::normalized(HermitianMatrix::diag(&[1.5, 0.5]))?;
    let curve = decay_curve(&pauli_system(), &ConditionalExpectation::Trace { n: 2 }, &rho, &grid)?;
    print!("{}", curve.to_csv());
    println!("pauli fitted rate {:?}", curve.fitted_rate);

    let g = WeightedGraph::complete(3)?;
    let rho = random_state(&mut seeded(3), 3, 1.0);
    let curve = decay_curve(&graph_lindblad(&g), &ConditionalExpectation::Trace { n: 3 }, &rho, &grid)?;
    println!("triangle fitted rate {:?}", curve.fitted_rate);
    Ok(())
}
