//! Randomized property batteries behind `clsi verify`.
//!
//! Each battery draws its inputs from a fixed seed and reports the largest
//! residual it saw, where a residual `≤ 0` (or below the stated tolerance)
//! means the property held.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::entropy::{entropy_to_expectation, fisher_lindblad, lindblad_rel_entropy, p_fisher, p_rel_entropy, State};
use crate::graphs::{verify_constant_chain, WeightedGraph};
use crate::lindblad::{
    diagonal_expectation, edge_expectation, expectation_residual, fixed_point_dim, gradient_estimate_check, graph_lindblad,
    pauli_matrices, ConditionalExpectation,
};
use crate::matfun::hermitian::{c, commutator, max_abs};
use crate::matfun::{
    log, quadrature_oracle_resolvent, quadrature_oracle_tilt, CMat, DoubleOperatorIntegral, HermitianMatrix, ScalarKernel,
    SpectralSuperoperator,
};
use crate::rng::{random_complex, random_hermitian, random_kraus, random_positive, random_state, seeded, Rand};
use crate::{entropy::hook_integral_check, Result};

pub const DOI_TOL: f64 = 1e-10;
pub const QUADRATURE_TOL: f64 = 1e-6;
pub const HOOK_TOL: f64 = 1e-8;
pub const HIAI_PETZ_TOL: f64 = 1e-9;
pub const FISHER_DERIVATIVE_TOL: f64 = 1e-5;
pub const LIMIT_TOL: f64 = 1e-2;
const INEQUALITY_TOL: f64 = 1e-12;

pub const BATTERY_NAMES: [&str; 10] = [
    "doi-identity",
    "hook-integral",
    "hiai-petz",
    "diagon",
    "diagon2",
    "edge-expectation",
    "bardet-p",
    "constant-chain",
    "gradient-estimate",
    "fisher-derivative",
];

/// Inputs shared by every battery. `None` selects the battery's own default.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryConfig {
    pub seed: u64,
    pub trials: Option<usize>,
    pub dims: Option<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { seed: 2024, trials: None, dims: None }
    }
}

impl BatteryConfig {
    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    fn dim(&self, rng: &mut Rand, lo: usize, hi: usize) -> usize {
        self.dims.unwrap_or_else(|| rng.random_range(lo..=hi))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryResult {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub trials: usize,
    /// Extra `key=value` facts worth printing.
    pub detail: Vec<String>,
}

impl BatteryResult {
    fn new(name: &str, trials: usize, max_residual: f64, passed: bool) -> Self {
        BatteryResult { name: name.into(), passed, max_residual, trials, detail: Vec::new() }
    }

    pub fn line(&self) -> String {
        format!("{}: {} ({:e})", self.name, if self.passed { "PASS" } else { "FAIL" }, self.max_residual)
    }
}

/// The connected graphs on 3..=5 vertices used by the graph batteries.
pub fn graph_battery() -> Vec<WeightedGraph> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push(WeightedGraph::path(n).unwrap());
        out.push(WeightedGraph::cycle(n).unwrap());
        out.push(WeightedGraph::complete(n).unwrap());
        out.push(WeightedGraph::star(n - 1).unwrap());
    }
    out.push(WeightedGraph::unweighted(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap());
    out.push(WeightedGraph::unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)]).unwrap());
    out.push(WeightedGraph::unweighted(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 2)]).unwrap());
    out.push(WeightedGraph::new(4, &[(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.5), (3, 0, 1.0)], None).unwrap());
    out
}

/// `δ(ln ρ) = Q^ρ_log(δρ)` for `δ = [X, ·]`, plus the quadrature oracles
/// against the closed-form kernels.
pub fn doi_identity(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(100);
    let mut rng = seeded(cfg.seed);
    let (mut ident, mut quad) = (0.0f64, 0.0f64);
    for k in 0..trials {
        let n = cfg.dim(&mut rng, 2, 5);
        let rho = random_positive(&mut rng, n, 0.05, 20.0);
        let x = random_hermitian(&mut rng, n, 1.0);
        let lhs = commutator(x.as_mat(), log(&rho)?.as_mat());
        let q = DoubleOperatorIntegral::new(&rho, &rho, &ScalarKernel::LogQuotient)?;
        let rhs = q.apply(&commutator(x.as_mat(), rho.as_mat()));
        ident = ident.max(max_abs(&(lhs - rhs)));
        // the quadratures are slower, so every fifth trial exercises them
        if k % 5 == 0 {
            let t = random_complex(&mut rng, n, n);
            let tilt = DoubleOperatorIntegral::new(&rho, &rho, &ScalarKernel::Tilt)?.apply(&t);
            let rel = |a: &CMat, b: &CMat| max_abs(&(a - b)) / max_abs(b).max(1.0);
            quad = quad.max(rel(&quadrature_oracle_resolvent(&rho, &t, 64)?, &q.apply(&t)));
            quad = quad.max(rel(&quadrature_oracle_tilt(&rho, &t, 64)?, &tilt));
        }
    }
    let mut r = BatteryResult::new("doi-identity", trials, ident, ident <= DOI_TOL && quad <= QUADRATURE_TOL);
    r.detail.push(format!("identity_residual={ident:e}"));
    r.detail.push(format!("quadrature_residual={quad:e}"));
    Ok(r)
}

pub fn hook_integral(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(50);
    let mut rng = seeded(cfg.seed ^ 1);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = cfg.dims.unwrap_or(3);
        let rho = random_positive(&mut rng, n, 0.1, 2.0);
        let sigma = random_positive(&mut rng, n, 0.1, 2.0);
        worst = worst.max(hook_integral_check(&rho, &sigma, 64)?);
    }
    Ok(BatteryResult::new("hook-integral", trials, worst, worst < HOOK_TOL))
}

/// Dense `n²×n²` matrix of `X ↦ Σ K X K*`.
fn channel_matrix(kraus: &[CMat]) -> CMat {
    kraus.iter().map(|k| k.conjugate().kronecker(k)).fold(None, |acc: Option<CMat>, m| Some(acc.map_or(m.clone(), |a| a + m))).expect("at least one Kraus operator")
}

fn apply_channel(kraus: &[CMat], x: &CMat) -> CMat {
    kraus.iter().fold(CMat::zeros(x.nrows(), x.ncols()), |acc, k| acc + k * x * k.adjoint())
}

/// `β Q^{ρ,σ}_tilt β* ⪯ Q^{βρ,βσ}_tilt` for random channels `β`.
pub fn hiai_petz(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(100);
    let mut rng = seeded(cfg.seed ^ 2);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let n = cfg.dim(&mut rng, 2, 3);
        let count = rng.random_range(2..=4);
        let kraus = random_kraus(&mut rng, n, count);
        let rho = random_positive(&mut rng, n, 0.1, 2.0);
        let sigma = random_positive(&mut rng, n, 0.1, 2.0);
        let b = channel_matrix(&kraus);
        let q = DoubleOperatorIntegral::new(&rho, &sigma, &ScalarKernel::Tilt)?.superoperator();
        let brho = HermitianMatrix::symmetrized(apply_channel(&kraus, rho.as_mat()));
        let bsigma = HermitianMatrix::symmetrized(apply_channel(&kraus, sigma.as_mat()));
        let q2 = DoubleOperatorIntegral::new(&brho, &bsigma, &ScalarKernel::Tilt)?.superoperator();
        let diff = HermitianMatrix::symmetrized(q2 - &b * q * b.adjoint());
        worst = worst.max(-diff.min_eigenvalue());
    }
    Ok(BatteryResult::new("hiai-petz", trials, worst, worst <= HIAI_PETZ_TOL))
}

fn states_per_graph(cfg: &BatteryConfig) -> usize {
    cfg.trials(100)
}

/// `D(ρ‖E_∞ρ) ≤ 5π² I(ρ)` on the graph battery.
pub fn diagon(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let per = states_per_graph(cfg);
    let mut rng = seeded(cfg.seed ^ 3);
    let mut worst = f64::NEG_INFINITY;
    let graphs = graph_battery();
    for g in &graphs {
        let s = graph_lindblad(g);
        let e = diagonal_expectation(g.n());
        for _ in 0..per {
            let scale = 10f64.powf(rng.random_range(-1.5..0.5));
            let rho = random_state(&mut rng, g.n(), scale);
            let d = entropy_to_expectation(&rho, &e)?;
            let i = fisher_lindblad(&s, &rho)?;
            worst = worst.max((d - 5.0 * PI * PI * i) / d.max(1e-300));
        }
    }
    Ok(BatteryResult::new("diagon", per * graphs.len(), worst, worst <= INEQUALITY_TOL))
}

/// `I(E_∞ρ) ≤ I(ρ)` on the graph battery.
pub fn diagon2(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let per = states_per_graph(cfg);
    let mut rng = seeded(cfg.seed ^ 4);
    let mut worst = f64::NEG_INFINITY;
    let graphs = graph_battery();
    for g in &graphs {
        let s = graph_lindblad(g);
        let e = diagonal_expectation(g.n());
        for _ in 0..per {
            let scale = 10f64.powf(rng.random_range(-1.5..0.5));
            let rho = random_state(&mut rng, g.n(), scale);
            let pinched = State::new(e.apply_herm(rho.matrix())?)?;
            let i = fisher_lindblad(&s, &rho)?;
            let ip = fisher_lindblad(&s, &pinched)?;
            worst = worst.max((ip - i) / i.max(1e-300));
        }
    }
    Ok(BatteryResult::new("diagon2", per * graphs.len(), worst, worst <= INEQUALITY_TOL))
}

/// `∏_e E_e = E_∞` (as masks and as maps) and the expectation axioms.
pub fn edge_expectations(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let per = cfg.trials(20);
    let mut rng = seeded(cfg.seed ^ 5);
    let mut worst = 0.0f64;
    let mut exact = true;
    let graphs = graph_battery();
    for g in &graphs {
        let n = g.n();
        let edges: Vec<ConditionalExpectation> =
            g.edges().iter().map(|&(r, s, _)| edge_expectation(r, s, n)).collect::<Result<_>>()?;
        let diag = diagonal_expectation(n);
        let mut mask = nalgebra::DMatrix::from_element(n, n, true);
        for e in &edges {
            mask = mask.zip_map(&e.mask().expect("edge expectations are Schur masks"), |a, b| a && b);
        }
        exact &= mask == diag.mask().expect("diagonal is a Schur mask");
        for _ in 0..per {
            let x = random_complex(&mut rng, n, n);
            let composed = edges.iter().fold(x.clone(), |acc, e| e.apply(&acc));
            worst = worst.max(max_abs(&(composed - diag.apply(&x))));
            for e in edges.iter().chain([&diag]) {
                worst = worst.max(expectation_residual(e, &x));
                let p = random_positive(&mut rng, n, 0.01, 2.0);
                worst = worst.max(-e.apply_herm(&p)?.min_eigenvalue());
            }
        }
    }
    let mut r = BatteryResult::new("edge-expectation", per * graphs.len(), worst, exact && worst <= 1e-10);
    r.detail.push(format!("product_equals_diagonal={exact}"));
    Ok(r)
}

/// `p·d^p(ρ‖Eρ) ≤ I^p_{id−E}(ρ)` for random block pinchings, and the `p → 1` limits.
pub fn bardet_p(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(40);
    let mut rng = seeded(cfg.seed ^ 6);
    let mut worst = f64::NEG_INFINITY;
    let mut limit = 0.0f64;
    for _ in 0..trials {
        let n = cfg.dim(&mut rng, 2, 5);
        let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        // at least two blocks, so that E is not the identity
        if labels.iter().all(|&l| l == labels[0]) {
            labels[0] += 1;
        }
        let e = ConditionalExpectation::block_pinching(&labels);
        let e2 = e.clone();
        let s = SpectralSuperoperator::from_map(n, move |x| x - e2.apply(x));
        let scale = 10f64.powf(rng.random_range(-1.0..0.3));
        let rho = random_state(&mut rng, n, scale);
        let sigma = e.apply_herm(rho.matrix())?;
        for p in [1.1, 1.5, 1.9] {
            let lhs = p * p_rel_entropy(rho.matrix(), &sigma, p)?;
            let rhs = p_fisher(&s, &rho, p)?;
            worst = worst.max((lhs - rhs) / rhs.abs().max(1e-300));
        }
        let q = 1.001;
        let d_lin = lindblad_rel_entropy(rho.matrix(), &sigma)?;
        let i = fisher_lindblad(&s, &rho)?;
        if d_lin > 1e-12 {
            limit = limit.max((p_rel_entropy(rho.matrix(), &sigma, q)? / (q - 1.0) / d_lin - 1.0).abs());
            limit = limit.max((p_fisher(&s, &rho, q)? / (q - 1.0) / i - 1.0).abs());
        }
    }
    let mut r = BatteryResult::new("bardet-p", trials, worst, worst <= INEQUALITY_TOL && limit <= LIMIT_TOL);
    r.detail.push(format!("limit_relative_error={limit:e}"));
    Ok(r)
}

pub fn constant_chain(_cfg: &BatteryConfig) -> Result<BatteryResult> {
    let report = verify_constant_chain();
    let mut r = BatteryResult::new("constant-chain", report.grid_points, report.violations.len() as f64, report.passed);
    r.detail.push(format!("ratio={}", crate::json::fmt_f64(report.ratio)));
    r.detail.push(format!("lower={} upper={}", crate::json::fmt_f64(report.lower), crate::json::fmt_f64(report.upper)));
    r.detail.push(format!("chain_n={:?}", report.chain_ns));
    Ok(r)
}

/// Pauli system: the estimate holds at `λ = 1` on `t ∈ {0.1, 0.5, 1}` and is
/// violated at the inflated `λ = 5`.
pub fn gradient_estimate(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(20);
    let mut rng = seeded(cfg.seed ^ 7);
    let [x, y, _] = pauli_matrices();
    let gens = [HermitianMatrix::new(x * c(0.5))?, HermitianMatrix::new(y * c(0.5))?];
    let grid = [0.1, 0.5, 1.0];
    let mut worst = f64::NEG_INFINITY;
    let mut rejected = true;
    for _ in 0..trials {
        let rho = random_state(&mut rng, 2, 1.0);
        let a = random_hermitian(&mut rng, 2, 1.0);
        worst = worst.max(gradient_estimate_check(&gens, 1.0, &rho, &a, &grid)?.max_residual);
        rejected &= !gradient_estimate_check(&gens, 5.0, &rho, &a, &grid)?.passed;
    }
    let mut r = BatteryResult::new("gradient-estimate", trials, worst, worst <= crate::lindblad::GRADIENT_TOL && rejected);
    r.detail.push(format!("inflated_lambda_rejected={rejected}"));
    Ok(r)
}

/// Numerical derivative of `t ↦ D(T_tρ‖E_fix ρ)` at `0` against `−I(ρ)`.
pub fn fisher_derivative(cfg: &BatteryConfig) -> Result<BatteryResult> {
    let trials = cfg.trials(50);
    let mut rng = seeded(cfg.seed ^ 8);
    let mut worst = 0.0f64;
    let h = 1e-4;
    for _ in 0..trials {
        let n = cfg.dim(&mut rng, 2, 4);
        let count = rng.random_range(1..=3);
        let gens: Vec<HermitianMatrix> = (0..count).map(|_| random_hermitian(&mut rng, n, 0.7)).collect();
        let s = SpectralSuperoperator::from_generators(n, &gens)?;
        let e = fixed_point_dim(&s).expectation;
        let rho = random_state(&mut rng, n, 0.8);
        let fixed = e.apply_herm(rho.matrix())?;
        let d_at = |t: f64| -> Result<f64> {
            let rt = HermitianMatrix::symmetrized(s.propagate(t, rho.as_mat()));
            lindblad_rel_entropy(&rt, &fixed)
        };
        // five-point stencil, truncation error O(h⁴)
        let derivative = (8.0 * (d_at(h)? - d_at(-h)?) - (d_at(2.0 * h)? - d_at(-2.0 * h)?)) / (12.0 * h);
        let i = fisher_lindblad(&s, &rho)?;
        worst = worst.max((derivative + i).abs() / i.abs().max(1e-300));
    }
    Ok(BatteryResult::new("fisher-derivative", trials, worst, worst <= FISHER_DERIVATIVE_TOL))
}

/// Run one battery by name.
pub fn run_battery(name: &str, cfg: &BatteryConfig) -> Result<BatteryResult> {
    match name {
        "doi-identity" => doi_identity(cfg),
        "hook-integral" => hook_integral(cfg),
        "hiai-petz" => hiai_petz(cfg),
        "diagon" => diagon(cfg),
        "diagon2" => diagon2(cfg),
        "edge-expectation" => edge_expectations(cfg),
        "bardet-p" => bardet_p(cfg),
        "constant-chain" => constant_chain(cfg),
        "gradient-estimate" => gradient_estimate(cfg),
        "fisher-derivative" => fisher_derivative(cfg),
        other => Err(crate::Error::OutOfRange(format!("unknown battery '{other}'; known: {}", BATTERY_NAMES.join(", ")))),
    }
}

pub fn run_all(cfg: &BatteryConfig) -> Result<Vec<BatteryResult>> {
    BATTERY_NAMES.iter().map(|name| run_battery(name, cfg)).collect()
}
