//! Weighted graphs, spanning-tree covers and certified CLSI lower bounds.
//!
//! The classical dynamics on a graph `(V, E, μ, w)` is the one whose Fisher
//! information is the ordered-pair sum
//!
//! ```text
//! I(f) = Σ_x μ(x) Σ_{y~x} w_xy (f(y) − f(x)) (ln f(y) − ln f(x)),
//! ```
//!
//! so its generator is `A f(x) = μ(x)⁻¹ Σ_{y~x} (μ(x) + μ(y)) w_xy (f(x) − f(y))`.
//! For uniform measure and unit weights that is twice the combinatorial
//! Laplacian, which is also what the graph Lindbladian does on diagonals.

mod certificate;
mod tree;

use std::collections::VecDeque;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use serde_json::Value;

use crate::{Error, Result};

pub use certificate::{
    certified_bound, cyclic_bound, lindblad_bound, verify_constant_chain, BoundBlock, BoundCertificate, ConstantChainReport,
    CoverSummary, GraphSummary, MstSummary, RatioBlock, CERTIFICATE_SCHEMA_VERSION,
};
pub use tree::{kruskal_mst, traversal_cover, verify_cover, CoverVerdict, CyclicCover, SpanningTree};

const MEASURE_TOL: f64 = 1e-12;

/// Undirected graph with positive edge weights and a probability measure on vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    /// `(u, v, w)` with `u < v`, in insertion order.
    edges: Vec<(usize, usize, f64)>,
    measure: Vec<f64>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

impl WeightedGraph {
    /// Validating constructor; `measure = None` means uniform.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], measure: Option<Vec<f64>>) -> Result<Self> {
        if n < 2 {
            return Err(parse_err("n", format!("need at least 2 vertices, got {n}")));
        }
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (k, &(a, b, w)) in edges.iter().enumerate() {
            let loc = format!("edges[{k}]");
            if a >= n || b >= n {
                return Err(parse_err(loc, format!("vertex out of range 0..{n}")));
            }
            if a == b {
                return Err(parse_err(loc, "self-loop"));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(parse_err(loc, format!("weight must be positive, got {w}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(parse_err(loc, format!("duplicate edge ({u},{v})")));
            }
            out.push((u, v, w));
        }
        let measure = match measure {
            None => vec![1.0 / n as f64; n],
            Some(m) => {
                if m.len() != n {
                    return Err(parse_err("measure", format!("length {} but n = {n}", m.len())));
                }
                for (i, &x) in m.iter().enumerate() {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(parse_err(format!("measure[{i}]"), format!("must be positive, got {x}")));
                    }
                }
                let s: f64 = m.iter().sum();
                if (s - 1.0).abs() > MEASURE_TOL {
                    return Err(parse_err("measure", format!("sums to {s}, not 1")));
                }
                m
            }
        };
        Ok(WeightedGraph { n, edges: out, measure })
    }

    /// Unit weights, uniform measure.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::new(n, &e, None)
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::unweighted(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::OutOfRange(format!("cycle needs n >= 3, got {n}")));
        }
        Self::unweighted(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::unweighted(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Self::unweighted(n, &e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.iter().find(|e| e.0 == a && e.1 == b).map(|e| e.2)
    }

    /// Sorted neighbor lists with weights.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for a in &mut adj {
            a.sort_by_key(|&(v, _)| v);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v, _) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.n as f64;
        self.measure.iter().all(|&m| (m - u).abs() <= MEASURE_TOL)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1.0)
    }

    /// Connected, 2-regular, `n ≥ 3`.
    pub fn is_single_cycle(&self) -> bool {
        self.n >= 3 && self.edges.len() == self.n && self.degrees().iter().all(|&d| d == 2) && self.is_connected()
    }

    /// Breadth-first reachability from vertex 0.
    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Component label of each vertex, labels in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Symmetric Dirichlet-form matrix `Q` with `⟨f, A g⟩_μ = fᵀ Q g`.
    pub fn dirichlet_matrix(&self) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            let c = (self.measure[u] + self.measure[v]) * w;
            q[(u, u)] += c;
            q[(v, v)] += c;
            q[(u, v)] -= c;
            q[(v, u)] -= c;
        }
        q
    }

    /// Generator `A = M⁻¹Q` acting on functions.
    pub fn generator_matrix(&self) -> DMatrix<f64> {
        let mut a = self.dirichlet_matrix();
        for (i, mut row) in a.row_iter_mut().enumerate() {
            row /= self.measure[i];
        }
        a
    }

    /// Eigenpairs of `M^{-1/2} Q M^{-1/2}`, ascending; eigenvectors are returned
    /// as functions `M^{-1/2} v` (orthonormal in `L²(μ)`).
    pub fn classical_spectrum(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let s: Vec<f64> = self.measure.iter().map(|m| 1.0 / m.sqrt()).collect();
        let q = self.dirichlet_matrix();
        let sym = DMatrix::from_fn(self.n, self.n, |i, j| s[i] * q[(i, j)] * s[j]);
        let se = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let vals = order.iter().map(|&k| se.eigenvalues[k]).collect();
        let vecs = order.iter().map(|&k| (0..self.n).map(|i| se.eigenvectors[(i, k)] * s[i]).collect()).collect();
        (vals, vecs)
    }

    /// Smallest nonzero eigenvalue of the classical generator.
    pub fn classical_gap(&self) -> Result<f64> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let (vals, _) = self.classical_spectrum();
        Ok(vals[1])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let obj = doc.as_object().ok_or_else(|| parse_err("$", "expected a JSON object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err("n", "missing or not a nonnegative integer"))? as usize;
        let raw = obj.get("edges").and_then(Value::as_array).ok_or_else(|| parse_err("edges", "missing or not an array"))?;
        let mut edges = Vec::with_capacity(raw.len());
        for (k, e) in raw.iter().enumerate() {
            let loc = format!("edges[{k}]");
            let arr = e.as_array().filter(|a| a.len() == 2 || a.len() == 3).ok_or_else(|| parse_err(&loc, "expected [u, v] or [u, v, w]"))?;
            let idx = |i: usize| arr[i].as_u64().map(|x| x as usize).ok_or_else(|| parse_err(&loc, "vertex must be a nonnegative integer"));
            let w = match arr.get(2) {
                Some(x) => x.as_f64().ok_or_else(|| parse_err(&loc, "weight must be a number"))?,
                None => 1.0,
            };
            edges.push((idx(0)?, idx(1)?, w));
        }
        let measure = match obj.get("measure") {
            None | Some(Value::Null) => None,
            Some(Value::Array(a)) => Some(
                a.iter()
                    .enumerate()
                    .map(|(i, x)| x.as_f64().ok_or_else(|| parse_err(format!("measure[{i}]"), "must be a number")))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(_) => return Err(parse_err("measure", "expected an array")),
        };
        Self::new(n, &edges, measure)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            n: usize,
            edges: Vec<(usize, usize, f64)>,
            measure: &'a [f64],
        }
        crate::json::to_string(&Doc { n: self.n, edges: self.edges.clone(), measure: &self.measure })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::json::write_atomic(path, self.to_json().as_bytes())
    }
}

pub fn load_graph(text: &str) -> Result<WeightedGraph> {
    WeightedGraph::from_json(text)
}

pub fn is_connected(g: &WeightedGraph) -> bool {
    g.is_connected()
}

/// Classical Fisher information of a positive scalar field.
pub fn classical_fisher(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.edges
        .iter()
        .map(|&(u, v, w)| (g.measure[u] + g.measure[v]) * w * (f[v] - f[u]) * (f[v].ln() - f[u].ln()))
        .sum()
}
