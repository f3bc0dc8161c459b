//! Certified bounds against numeric estimates for the triangle and the path P4.

use clsi::estimator::{sandwich_check, EstimateOptions};
use clsi::WeightedGraph;

fn main() -> clsi::Result<()> {
    let opts = EstimateOptions { restarts: 16, seed: 1, ..Default::default() };
    for (name, g) in [("K3", WeightedGraph::complete(3)?), ("P4", WeightedGraph::path(4)?)] {
        let r = sandwich_check(&g, &opts)?;
        println!("{name}: certified {:.4e} <= matrix {:.6} <= classical {:.6}", r.certified_lindblad, r.matrix.value, r.classical.value);
        for c in &r.checks {
            println!("  {:<32} {:.6e} <= {:.6e}  {}", c.name, c.lhs, c.rhs, if c.holds { "ok" } else { "VIOLATED" });
        }
    }
    Ok(())
}
