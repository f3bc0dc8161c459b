use serde::Serialize;

use super::WeightedGraph;
use crate::{Error, Result};

const COVER_TOL: f64 = 1e-12;

/// Spanning tree of a parent graph, weights inherited.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanningTree {
    pub n: usize,
    /// `(u, v, w)` with `u < v`, in the order Kruskal accepted them.
    pub edges: Vec<(usize, usize, f64)>,
    /// Edge count.
    pub l: usize,
    /// Maximum vertex degree within the tree.
    pub d: usize,
}

impl SpanningTree {
    /// Treat an arbitrary graph as a tree, checking that it is one.
    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        if g.edges().len() != g.n() - 1 {
            return Err(Error::OutOfRange(format!("{} edges on {} vertices is not a tree", g.edges().len(), g.n())));
        }
        Ok(Self::assemble(g.n(), g.edges().to_vec()))
    }

    fn assemble(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut deg = vec![0; n];
        for &(u, v, _) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        SpanningTree { n, l: edges.len(), d: deg.into_iter().max().unwrap_or(0), edges }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.iter().any(|e| e.0 == a && e.1 == b)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

/// Kruskal with edges sorted by `(weight, u, v)`.
pub fn kruskal_mst(g: &WeightedGraph) -> Result<SpanningTree> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut order = g.edges().to_vec();
    order.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut chosen = Vec::with_capacity(g.n() - 1);
    for (u, v, w) in order {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            chosen.push((u, v, w));
            if chosen.len() == g.n() - 1 {
                break;
            }
        }
    }
    Ok(SpanningTree::assemble(g.n(), chosen))
}

/// Cycle covering a tree, produced by the preorder walk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicCover {
    pub root: usize,
    /// `φ(i)` for cycle position `i`; the cycle closes from the last entry back to the first.
    pub sequence: Vec<usize>,
    /// `m_φ(x)`: number of cycle positions over tree vertex `x`.
    pub vertex_multiplicity: Vec<usize>,
    /// `m_φ(x, y)` per tree edge, in tree edge order.
    pub edge_multiplicity: Vec<((usize, usize), usize)>,
    /// `μ′(x) = m_φ(x) / 2l`.
    pub mu_prime: Vec<f64>,
    /// `w′(x, y) = m_φ(x, y)`, in tree edge order.
    pub w_prime: Vec<((usize, usize), f64)>,
}

impl CyclicCover {
    pub fn phi(&self, position: usize) -> usize {
        self.sequence[position]
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// The tree re-weighted by `(μ′, w′)`, which this cover covers exactly.
    pub fn covered_tree(&self) -> Result<WeightedGraph> {
        let edges: Vec<_> = self.w_prime.iter().map(|&((u, v), w)| (u, v, w)).collect();
        WeightedGraph::new(self.vertex_multiplicity.len(), &edges, Some(self.mu_prime.clone()))
    }
}

fn cycle_edges(seq: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let k = seq.len();
    (0..k).map(move |i| (seq[i], seq[(i + 1) % k]))
}

/// Preorder traversal cover; `root = None` picks the smallest-index leaf.
/// Children are visited in ascending index order.
pub fn traversal_cover(t: &SpanningTree, root: Option<usize>) -> Result<CyclicCover> {
    if t.n < 2 || t.l != t.n - 1 {
        return Err(Error::OutOfRange("traversal needs a tree on at least 2 vertices".into()));
    }
    let adj = t.neighbors();
    let root = match root {
        Some(r) if r < t.n => r,
        Some(r) => return Err(Error::OutOfRange(format!("root {r} is not a tree vertex"))),
        None => (0..t.n).find(|&x| adj[x].len() == 1).expect("a tree with an edge has a leaf"),
    };
    let mut visited = vec![false; t.n];
    let mut parent = vec![usize::MAX; t.n];
    let mut seq = vec![root];
    visited[root] = true;
    let mut v = root;
    loop {
        if let Some(&c) = adj[v].iter().find(|&&c| !visited[c]) {
            visited[c] = true;
            parent[c] = v;
            v = c;
        } else if v == root {
            break;
        } else {
            v = parent[v];
        }
        if v == root && adj[v].iter().all(|&c| visited[c]) {
            // arriving back at the root for the last time closes the cycle
            break;
        }
        seq.push(v);
    }
    let two_l = seq.len();
    if two_l != 2 * t.l {
        return Err(Error::Consistency(format!("cycle length {two_l} != 2l = {}", 2 * t.l)));
    }
    let mut vm = vec![0usize; t.n];
    for &x in &seq {
        vm[x] += 1;
    }
    let mut em = vec![0usize; t.l];
    for (a, b) in cycle_edges(&seq) {
        let (u, w) = (a.min(b), a.max(b));
        let k = t.edges.iter().position(|e| e.0 == u && e.1 == w).expect("walk follows tree edges");
        em[k] += 1;
    }
    Ok(CyclicCover {
        root,
        mu_prime: vm.iter().map(|&m| m as f64 / two_l as f64).collect(),
        w_prime: t.edges.iter().zip(&em).map(|(e, &m)| ((e.0, e.1), m as f64)).collect(),
        edge_multiplicity: t.edges.iter().zip(&em).map(|(e, &m)| ((e.0, e.1), m)).collect(),
        vertex_multiplicity: vm,
        sequence: seq,
    })
}

/// Outcome of [`verify_cover`]; `reasons` names each violated condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverVerdict {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Check that the uniform unit-weight cycle over `cover.sequence` covers `target`:
/// edge, measure and weight preservation, each within 1e-12.
pub fn verify_cover(cover: &CyclicCover, target: &WeightedGraph) -> CoverVerdict {
    let mut reasons = Vec::new();
    let seq = &cover.sequence;
    let k = seq.len();
    let n = target.n();

    let in_range = seq.iter().all(|&x| x < n);
    let edge_ok = k >= 2 && in_range && cycle_edges(seq).all(|(a, b)| a != b && target.weight(a, b).is_some());
    if !edge_ok {
        reasons.push("edge preserving".to_string());
    }

    let mut counts = vec![0usize; n];
    if in_range {
        for &x in seq {
            counts[x] += 1;
        }
    }
    let mass = |x: usize| counts[x] as f64 / k.max(1) as f64;
    let surjective = counts.iter().all(|&c| c > 0);
    let measure_ok = in_range
        && surjective
        && cover.mu_prime.len() == n
        && (0..n).all(|x| (target.measure()[x] - mass(x)).abs() <= COVER_TOL && (cover.mu_prime[x] - mass(x)).abs() <= COVER_TOL);
    if !measure_ok {
        reasons.push("measure preserving".to_string());
    }

    // each cycle edge carries weight 1, so the split weight is the preimage count
    let weight_ok = edge_ok && {
        let mut hits = std::collections::HashMap::new();
        for (a, b) in cycle_edges(seq) {
            *hits.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
        }
        let target_ok = target.edges().iter().all(|&(u, v, w)| (w - *hits.get(&(u, v)).unwrap_or(&0) as f64).abs() <= COVER_TOL);
        let field_ok = cover.w_prime.iter().all(|&((u, v), w)| (w - *hits.get(&(u, v)).unwrap_or(&0) as f64).abs() <= COVER_TOL);
        target_ok && field_ok
    };
    if !weight_ok {
        reasons.push("weight preserving".to_string());
    }
    CoverVerdict { ok: reasons.is_empty(), reasons }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_spanning_trees(g: &WeightedGraph) -> Vec<Vec<usize>> {
        let m = g.edges().len();
        let need = g.n() - 1;
        let mut out = Vec::new();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != need {
                continue;
            }
            let idx: Vec<usize> = (0..m).filter(|&k| mask >> k & 1 == 1).collect();
            let edges: Vec<_> = idx.iter().map(|&k| g.edges()[k]).collect();
            if WeightedGraph::new(g.n(), &edges, None).unwrap().is_connected() {
                out.push(idx);
            }
        }
        out
    }

    #[test]
    fn triangle_tie_break() {
        let t = kruskal_mst(&WeightedGraph::complete(3).unwrap()).unwrap();
        let e: Vec<_> = t.edges.iter().map(|e| (e.0, e.1)).collect();
        assert_eq!(e, vec![(0, 1), (0, 2)]);
        assert_eq!((t.l, t.d), (2, 2));
        assert_eq!(all_spanning_trees(&WeightedGraph::complete(3).unwrap()).len(), 3);
    }

    #[test]
    fn star_and_weighted_triangle() {
        let t = kruskal_mst(&WeightedGraph::star(3).unwrap()).unwrap();
        assert_eq!((t.l, t.d), (3, 3));
        let g = WeightedGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)], None).unwrap();
        let t = kruskal_mst(&g).unwrap();
        assert!(t.contains(0, 1) && t.contains(1, 2) && !t.contains(0, 2));
    }

    #[test]
    fn kruskal_rejects_disconnected() {
        let g = WeightedGraph::unweighted(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(kruskal_mst(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn kruskal_matches_exhaustive_minimum() {
        let g = WeightedGraph::new(
            5,
            &[(0, 1, 3.0), (1, 2, 1.0), (2, 3, 4.0), (3, 4, 1.0), (0, 4, 2.0), (1, 3, 2.0), (0, 2, 2.5)],
            None,
        )
        .unwrap();
        let best = all_spanning_trees(&g)
            .iter()
            .map(|idx| idx.iter().map(|&k| g.edges()[k].2).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(kruskal_mst(&g).unwrap().total_weight(), best);
    }

    #[test]
    fn path_cover_by_hand() {
        let t = kruskal_mst(&WeightedGraph::path(3).unwrap()).unwrap();
        let c = traversal_cover(&t, Some(0)).unwrap();
        assert_eq!(c.sequence, vec![0, 1, 2, 1]);
        assert_eq!(c.mu_prime, vec![0.25, 0.5, 0.25]);
        assert!(c.w_prime.iter().all(|&(_, w)| w == 2.0));
        assert!(verify_cover(&c, &c.covered_tree().unwrap()).ok);
    }

    #[test]
    fn single_edge_and_star() {
        let t = kruskal_mst(&WeightedGraph::path(2).unwrap()).unwrap();
        let c = traversal_cover(&t, None).unwrap();
        assert_eq!(c.sequence, vec![0, 1]);
        assert_eq!(c.mu_prime, vec![0.5, 0.5]);
        assert_eq!(c.edge_multiplicity, vec![((0, 1), 2)]);

        let t = kruskal_mst(&WeightedGraph::star(3).unwrap()).unwrap();
        let c = traversal_cover(&t, None).unwrap();
        assert_eq!(c.root, 1);
        assert_eq!(c.sequence, vec![1, 0, 2, 0, 3, 0]);
        assert_eq!(c.vertex_multiplicity[0], 3);
        assert_eq!(c.vertex_multiplicity.iter().sum::<usize>(), 6);
    }

    #[test]
    fn verify_detects_tampering() {
        let t = kruskal_mst(&WeightedGraph::path(3).unwrap()).unwrap();
        let c = traversal_cover(&t, Some(0)).unwrap();
        let target = c.covered_tree().unwrap();

        let mut cut = c.clone();
        cut.sequence.pop();
        let v = verify_cover(&cut, &target);
        assert!(!v.ok && v.reasons.contains(&"edge preserving".to_string()));

        let mut bumped = c.clone();
        bumped.mu_prime[0] += 1e-6;
        let v = verify_cover(&bumped, &target);
        assert_eq!(v.reasons, vec!["measure preserving".to_string()]);

        let mut heavy = c.clone();
        heavy.w_prime[0].1 = 3.0;
        assert_eq!(verify_cover(&heavy, &target).reasons, vec!["weight preserving".to_string()]);
    }

    #[test]
    fn bad_root_and_non_tree() {
        let t = kruskal_mst(&WeightedGraph::path(3).unwrap()).unwrap();
        assert!(traversal_cover(&t, Some(9)).is_err());
        assert!(SpanningTree::from_graph(&WeightedGraph::cycle(3).unwrap()).is_err());
    }
}
