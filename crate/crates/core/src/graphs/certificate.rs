use std::f64::consts::{E, PI};

use serde::Serialize;

use super::tree::{kruskal_mst, traversal_cover, verify_cover};
use super::WeightedGraph;
use crate::{Error, Result};

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// `16 / (45 n²)`, the bound for a uniform unit-weight cycle on `n` vertices.
pub fn cyclic_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("cyclic bound needs n >= 3, got {n}")));
    }
    let n = n as f64;
    Ok(16.0 / (45.0 * n * n))
}

/// Transfer a graph constant to its Lindbladian: `λ / (1 + 5π²λ)`.
pub fn lindblad_bound(lambda_graph: f64) -> Result<f64> {
    if !(lambda_graph > 0.0 && lambda_graph.is_finite()) {
        return Err(Error::OutOfRange(format!("graph constant must be positive, got {lambda_graph}")));
    }
    Ok(lambda_graph / (1.0 + 5.0 * PI * PI * lambda_graph))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edge_count: usize,
    pub uniform_measure: bool,
    pub unit_weights: bool,
    pub single_cycle: bool,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MstSummary {
    pub l: usize,
    pub d: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverSummary {
    pub root: usize,
    pub sequence: Vec<usize>,
    pub vertex_multiplicity: Vec<usize>,
    pub mu_prime: Vec<f64>,
    pub w_prime: Vec<((usize, usize), f64)>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioBlock {
    /// `‖dμ/dμ′‖∞`
    pub mu_over_mu_prime: f64,
    /// `‖dμ′/dμ‖∞`
    pub mu_prime_over_mu: f64,
    /// `‖w′/wˢ‖∞` over tree edges.
    pub w_prime_over_w: f64,
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundBlock {
    pub cyclic_special: Option<f64>,
    pub tree_general: f64,
    pub corollary_worst_case: Option<f64>,
    pub best: f64,
    /// Which of the above `best` came from.
    pub best_source: String,
}

/// Full chain from spanning tree to the certified constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub schema_version: u32,
    pub graph: GraphSummary,
    pub mst: MstSummary,
    pub cover: CoverSummary,
    pub ratios: RatioBlock,
    pub bounds: BoundBlock,
    pub lindblad_bound: f64,
    pub provenance: Vec<String>,
}

impl BoundCertificate {
    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }
}

/// Kruskal tree, preorder cover, exact ratios, and every bound whose hypotheses hold.
pub fn certified_bound(g: &WeightedGraph) -> Result<BoundCertificate> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let tree = kruskal_mst(g)?;
    let cover = traversal_cover(&tree, None)?;
    let verdict = verify_cover(&cover, &cover.covered_tree()?);
    if !verdict.ok {
        return Err(Error::Consistency(format!("traversal cover failed: {}", verdict.reasons.join(", "))));
    }
    let two_l = cover.len() as f64;
    let mu = g.measure();
    // μ′(x) = m(x)/2l, so both ratios are formed from the integer counts directly
    let mut mu_over = 0.0f64;
    let mut mu_prime_over = 0.0f64;
    for (x, &m) in cover.vertex_multiplicity.iter().enumerate() {
        mu_over = mu_over.max(mu[x] * two_l / m as f64);
        mu_prime_over = mu_prime_over.max(m as f64 / (two_l * mu[x]));
    }
    let w_over = tree.edges.iter().zip(&cover.w_prime).map(|(e, &(_, wp))| wp / e.2).fold(0.0f64, f64::max);
    let product = mu_over * mu_prime_over * w_over;
    let l = tree.l as f64;
    let tree_general = 4.0 / (45.0 * l * l * product);

    let mut provenance = vec![
        format!("spanning tree: Kruskal, edges sorted by (weight, u, v); l = {}, d = {}", tree.l, tree.d),
        format!("cover: preorder traversal from root {}, children in ascending order, cycle length {}", cover.root, cover.len()),
        "tree-general: 4 / (45 l² ‖dμ/dμ′‖∞ ‖dμ′/dμ‖∞ ‖w′/wˢ‖∞)".to_string(),
    ];
    let plain = g.is_uniform() && g.is_unit_weight();
    let corollary = plain.then(|| {
        provenance.push(
            "corollary: 2 / (45 l² d) with d the maximum degree of the spanning tree (not of the whole graph)".to_string(),
        );
        2.0 / (45.0 * l * l * tree.d as f64)
    });
    let cyclic = (plain && g.is_single_cycle()).then(|| {
        provenance.push(format!("cyclic-special: 16 / (45 n²) with n = {}", g.n()));
        cyclic_bound(g.n()).expect("cycles have n >= 3")
    });

    let mut best = ("tree-general", tree_general);
    for (name, v) in [("corollary-worst-case", corollary), ("cyclic-special", cyclic)] {
        if let Some(v) = v {
            if v > best.1 {
                best = (name, v);
            }
        }
    }
    provenance.push("lindblad: best / (1 + 5π² best)".to_string());

    Ok(BoundCertificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        graph: GraphSummary {
            n: g.n(),
            edge_count: g.edges().len(),
            uniform_measure: g.is_uniform(),
            unit_weights: g.is_unit_weight(),
            single_cycle: g.is_single_cycle(),
            max_degree: g.max_degree(),
        },
        mst: MstSummary { l: tree.l, d: tree.d, edges: tree.edges.clone() },
        cover: CoverSummary {
            root: cover.root,
            sequence: cover.sequence.clone(),
            vertex_multiplicity: cover.vertex_multiplicity.clone(),
            mu_prime: cover.mu_prime.clone(),
            w_prime: cover.w_prime.clone(),
            verified: verdict.ok,
        },
        ratios: RatioBlock { mu_over_mu_prime: mu_over, mu_prime_over_mu: mu_prime_over, w_prime_over_w: w_over, product },
        bounds: BoundBlock {
            cyclic_special: cyclic,
            tree_general,
            corollary_worst_case: corollary,
            best: best.1,
            best_source: best.0.to_string(),
        },
        lindblad_bound: lindblad_bound(best.1)?,
        provenance,
    })
}

/// Numeric audit of the constants behind the cycle bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantChainReport {
    pub grid_points: usize,
    /// Range of `√(2π) g(x)` over the grid.
    pub grid_min: f64,
    pub grid_max: f64,
    pub lower: f64,
    pub upper: f64,
    /// `2 · lower / upper`, compared against 4/5.
    pub ratio: f64,
    pub chain_ns: Vec<usize>,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// `√(2π) g(x) = Σ_{|k|≤20} e^{−(x−k)²/2}`
pub fn wrapped_gaussian_scaled(x: f64) -> f64 {
    (-20..=20).map(|k| (-(x - k as f64).powi(2) / 2.0).exp()).sum()
}

/// Wrapped-Gaussian sandwich on `[0, 1]`, the `4/5` ratio, and the
/// `3 · 5/4 · 3n²/4 = 45n²/16` chain for `n = 3..=8`.
pub fn verify_constant_chain() -> ConstantChainReport {
    const GRID: usize = 10_000;
    let lower = 2.0 * E.powf(-0.5) + 2.0 * E.powf(-2.0) + 2.0 * E.powf(-4.5) + 48.0 / 125.0 * E.powf(-12.5);
    let upper = 2.0 + 2.0 * E.powf(-0.5) + 2.0 * E.powf(-2.0) + 8.0 / 3.0 * E.powf(-4.5);
    let mut violations = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..GRID {
        let x = i as f64 / (GRID - 1) as f64;
        let v = wrapped_gaussian_scaled(x);
        lo = lo.min(v);
        hi = hi.max(v);
        if v < lower || v > upper {
            violations.push(format!("wrapped Gaussian at x = {x}: {v} outside [{lower}, {upper}]"));
        }
    }
    let ratio = 2.0 * lower / upper;
    if ratio < 0.8 {
        violations.push(format!("2·lower/upper = {ratio} < 4/5"));
    }
    let chain_ns: Vec<usize> = (3..=8).collect();
    for &n in &chain_ns {
        let n2 = (n * n) as f64;
        let lhs = 3.0 * 1.25 * (3.0 * n2 / 4.0);
        let rhs = 45.0 * n2 / 16.0;
        if lhs != rhs {
            violations.push(format!("3·(5/4)·(3n²/4) = {lhs} != 45n²/16 = {rhs} at n = {n}"));
        }
    }
    ConstantChainReport {
        grid_points: GRID,
        grid_min: lo,
        grid_max: hi,
        lower,
        upper,
        ratio,
        chain_ns,
        passed: violations.is_empty(),
        violations,
    }
}
