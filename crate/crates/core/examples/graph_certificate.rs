//! Certified lower bounds for a few small graphs and their Lindbladians.

use clsi::graphs::certified_bound;
use clsi::WeightedGraph;

fn main() -> clsi::Result<()> {
    let graphs = [
        ("cycle C4", WeightedGraph::cycle(4)?),
        ("star K1,3", WeightedGraph::star(3)?),
        ("path P5", WeightedGraph::path(5)?),
        ("weighted", WeightedGraph::new(4, &[(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.5), (0, 2, 1.0)], None)?),
    ];
    for (name, g) in graphs {
        let cert = certified_bound(&g)?;
        println!(
            "{name:<10} best={:.6e} ({}) lindblad={:.6e} tree={:?}",
            cert.bounds.best, cert.bounds.best_source, cert.lindblad_bound, cert.mst.edges
        );
    }
    // the full provenance chain is plain JSON
    println!("{}", certified_bound(&WeightedGraph::star(3)?)?.to_json());
    Ok(())
}
