//! Cover a spanning tree by the cycle traced out by its preorder walk.

use clsi::graphs::{kruskal_mst, traversal_cover, verify_cover};
use clsi::WeightedGraph;

fn main() -> clsi::Result<()> {
    let g = WeightedGraph::unweighted(6, &[(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (2, 3), (3, 5)])?;
    let tree = kruskal_mst(&g)?;
    println!("tree edges: {:?}", tree.edges);
    let cover = traversal_cover(&tree, None)?;
    println!("cycle: {:?}", cover.sequence);
    println!("vertex multiplicities: {:?}", cover.vertex_multiplicity);
    println!("mu': {:?}", cover.mu_prime);
    let verdict = verify_cover(&cover, &cover.covered_tree()?);
    println!("verified: {} {:?}", verdict.ok, verdict.reasons);
    Ok(())
}
