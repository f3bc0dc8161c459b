//! Relative entropies and Fisher informations of one state under the depolarizing semigroup.

use clsi::entropy::{entropy_to_expectation, fisher_lindblad, p_fisher, p_rel_entropy};
use clsi::lindblad::depolarizing;
use clsi::rng::{random_state, seeded};
use clsi::ConditionalExpectation;

fn main() -> clsi::Result<()> {
    let s = depolarizing(3)?;
    let e = ConditionalExpectation::Trace { n: 3 };
    let rho = random_state(&mut seeded(4), 3, 1.0);
    let d = entropy_to_expectation(&rho, &e)?;
    let i = fisher_lindblad(&s, &rho)?;
    println!("D = {d:.8}  I = {i:.8}  I/D = {:.6}", i / d);
    let sigma = e.apply_herm(rho.matrix())?;
    for p in [1.1, 1.5, 1.9] {
        let dp = p_rel_entropy(rho.matrix(), &sigma, p)?;
        let ip = p_fisher(&s, &rho, p)?;
        println!("p={p}: p*d^p = {:.8} <= I^p = {:.8}", p * dp, ip);
    }
    Ok(())
}
