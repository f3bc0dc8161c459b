//! `clsi` command line.
//!
//! stdout carries `key=value` lines, stderr carries human messages. Exit codes:
//! 0 success, 1 other error, 2 graph parse error, 3 disconnected graph,
//! 4 sandwich ordering violated, 5 decay curve rejected (non-monotone or fixed
//! initial state), 6 a verification battery failed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::battery::{run_all, run_battery, BatteryConfig};
use crate::entropy::State;
use crate::estimator::{
    clsi_probe, cpsi_estimate, decay_curve, mlsi_estimate, sandwich_check, EstimateOptions, EstimateReport,
};
use crate::graphs::{certified_bound, kruskal_mst, traversal_cover, verify_cover, WeightedGraph};
use crate::json::{fmt_f64, write_atomic};
use crate::lindblad::{depolarizing, fixed_point_dim, graph_lindblad, integer_spectrum_lindblad, pauli_system};
use crate::matfun::{HermitianMatrix, SpectralSuperoperator};
use crate::rng::{random_state, seeded};
use crate::{ConditionalExpectation, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DISCONNECTED: i32 = 3;
pub const EXIT_SANDWICH: i32 = 4;
pub const EXIT_DECAY: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "clsi", version, about = "Certified and numeric log-Sobolev constants for graphs and graph Lindbladians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified graph bound and its Lindblad transfer.
    Bound(GraphArgs),
    /// Kernel, spectral gap and certified bound of a Lindbladian.
    Lindblad(TargetArgs),
    /// Numeric MLSI/CpSI estimate, with the sandwich check for graphs.
    Estimate(EstimateArgs),
    /// Entropy decay curve along the semigroup.
    Decay(DecayArgs),
    /// Run the property batteries.
    Verify(VerifyArgs),
    /// Spanning tree and its cyclic cover.
    Cover(GraphArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// pauli | depolarizing:N | integer-spectrum:D0,D1,.. | graph
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Estimate the CpSI constant at this p in (1, 2).
    #[arg(long)]
    pub p: Option<f64>,
    /// Amplify by M_m before estimating.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// random:SEED | mixed | diag:A,B,.. | path to a JSON matrix of [re, im] pairs
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_stop: f64,
    #[arg(long, default_value_t = 21)]
    pub t_count: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = BatteryConfig::default().seed)]
    pub seed: u64,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Disconnected => EXIT_DISCONNECTED,
            _ => EXIT_OTHER,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parse `std::env::args`, run, and return the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Bound(a) => cmd_bound(&a),
        Command::Lindblad(a) => cmd_lindblad(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Decay(a) => cmd_decay(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Cover(a) => cmd_cover(&a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn write_out(path: Option<&Path>, contents: &str) -> CmdResult {
    if let Some(p) = path {
        write_atomic(p, contents.as_bytes())?;
        println!("out={}", p.display());
    }
    Ok(())
}

fn cmd_bound(a: &GraphArgs) -> CmdResult {
    let g = WeightedGraph::load(&a.graph)?;
    let cert = certified_bound(&g)?;
    println!("best={}", fmt_f64(cert.bounds.best));
    println!("lindblad_bound={}", fmt_f64(cert.lindblad_bound));
    write_out(a.out.as_deref(), &cert.to_json())
}

#[derive(Serialize)]
struct CoverOutput {
    tree_edges: Vec<(usize, usize, f64)>,
    sequence: Vec<usize>,
    /// `φ(i)` for every position of the cycle.
    phi: Vec<usize>,
    mu_prime: Vec<f64>,
    w_prime: Vec<((usize, usize), f64)>,
    vertex_multiplicity: Vec<usize>,
    edge_multiplicity: Vec<((usize, usize), usize)>,
    verified: bool,
    reasons: Vec<String>,
}

fn cmd_cover(a: &GraphArgs) -> CmdResult {
    let g = WeightedGraph::load(&a.graph)?;
    if !g.is_connected() {
        return Err(Error::Disconnected.into());
    }
    let tree = kruskal_mst(&g)?;
    let cover = traversal_cover(&tree, None)?;
    let verdict = verify_cover(&cover, &cover.covered_tree()?);
    let out = CoverOutput {
        tree_edges: tree.edges.clone(),
        phi: (0..cover.len()).map(|i| cover.phi(i)).collect(),
        sequence: cover.sequence.clone(),
        mu_prime: cover.mu_prime.clone(),
        w_prime: cover.w_prime.clone(),
        vertex_multiplicity: cover.vertex_multiplicity.clone(),
        edge_multiplicity: cover.edge_multiplicity.clone(),
        verified: verdict.ok,
        reasons: verdict.reasons.clone(),
    };
    let seq: Vec<String> = cover.sequence.iter().map(|v| v.to_string()).collect();
    println!("sequence=[{}]", seq.join(","));
    println!("length={}", cover.len());
    println!("verified={}", verdict.ok);
    write_out(a.out.as_deref(), &crate::json::to_string(&out))?;
    if verdict.ok {
        Ok(())
    } else {
        Err(fail(EXIT_OTHER, format!("cover verification failed: {}", verdict.reasons.join(", "))))
    }
}

/// A resolved target: the operator, its fixed-point expectation and a known lower bound.
struct Target {
    name: String,
    s: SpectralSuperoperator,
    e: ConditionalExpectation,
    certified: Option<f64>,
    graph: Option<WeightedGraph>,
}

fn resolve(t: &TargetArgs) -> std::result::Result<Target, Failure> {
    let name = match (&t.target, &t.graph) {
        (Some(n), _) => n.clone(),
        (None, Some(_)) => "graph".to_string(),
        (None, None) => return Err(fail(EXIT_PARSE, "need --target or --graph")),
    };
    let (s, certified, graph) = if name == "pauli" {
        (pauli_system(), Some(2.0), None)
    } else if let Some(n) = name.strip_prefix("depolarizing:") {
        let n: usize = n.parse().map_err(|_| fail(EXIT_PARSE, format!("bad dimension in '{name}'")))?;
        (depolarizing(n)?, Some(if n == 2 { 1.5 } else { 1.0 }), None)
    } else if let Some(spec) = name.strip_prefix("integer-spectrum:") {
        let vals = parse_list(spec)?;
        let l = integer_spectrum_lindblad(&HermitianMatrix::diag(&vals))?;
        (l.superoperator, Some(l.certified_bound), None)
    } else if name == "graph" {
        let path = t.graph.as_ref().ok_or_else(|| fail(EXIT_PARSE, "target 'graph' needs --graph"))?;
        let g = WeightedGraph::load(path)?;
        if !g.is_connected() {
            return Err(Error::Disconnected.into());
        }
        let cert = certified_bound(&g)?;
        (graph_lindblad(&g), Some(cert.lindblad_bound), Some(g))
    } else {
        return Err(fail(EXIT_PARSE, format!("unknown target '{name}'")));
    };
    let e = fixed_point_dim(&s).expectation;
    Ok(Target { name, s, e, certified, graph })
}

fn parse_list(spec: &str) -> std::result::Result<Vec<f64>, Failure> {
    spec.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| fail(EXIT_PARSE, format!("bad number '{v}'"))))
        .collect()
}

#[derive(Serialize)]
struct LindbladSummary {
    target: String,
    dim: usize,
    fixed_point_dim: usize,
    spectral_gap: Option<f64>,
    certified_bound: Option<f64>,
}

fn cmd_lindblad(a: &TargetArgs) -> CmdResult {
    let t = resolve(a)?;
    let fixed = fixed_point_dim(&t.s);
    let gap = t.s.spectral_gap().ok();
    println!("dim={}", t.s.dim());
    println!("fixed_point_dim={}", fixed.dim);
    println!("spectral_gap={}", gap.map_or("none".into(), fmt_f64));
    if let Some(b) = t.certified {
        println!("certified_bound={}", fmt_f64(b));
    }
    let summary = LindbladSummary {
        target: t.name,
        dim: t.s.dim(),
        fixed_point_dim: fixed.dim,
        spectral_gap: gap,
        certified_bound: t.certified,
    };
    write_out(a.out.as_deref(), &crate::json::to_string(&summary))
}

fn cmd_estimate(a: &EstimateArgs) -> CmdResult {
    let opts = EstimateOptions { restarts: a.restarts, seed: a.seed, tol: a.tol, ..Default::default() };
    let t = resolve(&a.target)?;
    if let (Some(g), None, None) = (&t.graph, a.p, a.m) {
        let report = sandwich_check(g, &opts)?;
        println!("certified_graph={}", fmt_f64(report.certified_graph));
        println!("certified_lindblad={}", fmt_f64(report.certified_lindblad));
        println!("classical={}", fmt_f64(report.classical.value));
        println!("matrix={}", fmt_f64(report.matrix.value));
        println!("value={}", fmt_f64(report.matrix.value));
        write_out(a.target.out.as_deref(), &report.to_json())?;
        let failures = report.failures();
        println!("sandwich={}", if failures.is_empty() { "pass" } else { "fail" });
        if !failures.is_empty() {
            return Err(fail(EXIT_SANDWICH, format!("sandwich ordering violated: {}", failures.join(", "))));
        }
        return Ok(());
    }
    let report: EstimateReport = match (a.p, a.m) {
        (Some(_), Some(_)) => return Err(fail(EXIT_PARSE, "--p and --m cannot be combined")),
        (Some(p), None) => cpsi_estimate(&t.s, &t.e, p, &opts)?,
        (None, Some(m)) => clsi_probe(&t.s, &t.e, m, &opts)?,
        (None, None) => mlsi_estimate(&t.s, &t.e, &opts)?,
    };
    // the certified CpSI floor of id − E is p itself
    let certified = match (a.p, t.name.starts_with("depolarizing:")) {
        (Some(p), true) => Some(p),
        (Some(_), false) => None,
        (None, _) => t.certified,
    };
    let report = report.labeled(t.name.clone());
    let report = match certified {
        Some(c) => report.with_sandwich(c),
        None => report,
    };
    println!("value={}", fmt_f64(report.value));
    if let Some(g) = report.gap_upper {
        println!("gap_upper={}", fmt_f64(g));
    }
    write_out(a.target.out.as_deref(), &report.to_json())?;
    if let Some(block) = &report.sandwich {
        println!("certified_lower={}", fmt_f64(block.certified_lower));
        println!("sandwich={}", if block.holds { "pass" } else { "fail" });
        if !block.holds {
            let pair = if block.certified_lower > block.numeric_estimate + block.slack {
                "certified <= estimate"
            } else {
                "estimate <= 2 gap"
            };
            return Err(fail(EXIT_SANDWICH, format!("sandwich ordering violated: {pair}")));
        }
    }
    Ok(())
}

fn initial_state(spec: &str, n: usize) -> std::result::Result<State, Failure> {
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed.parse().map_err(|_| fail(EXIT_PARSE, format!("bad seed in '{spec}'")))?;
        return Ok(random_state(&mut seeded(seed), n, 1.0));
    }
    if spec == "mixed" {
        return Ok(State::maximally_mixed(n));
    }
    let h = if let Some(vals) = spec.strip_prefix("diag:") {
        HermitianMatrix::diag(&parse_list(vals)?)
    } else {
        let text = std::fs::read_to_string(spec).map_err(Error::from)?;
        let rows: Vec<Vec<[f64; 2]>> =
            serde_json::from_str(&text).map_err(|e| fail(EXIT_PARSE, format!("state file {spec}: {e}")))?;
        HermitianMatrix::from_pairs(&rows)?
    };
    if h.dim() != n {
        return Err(Error::DimensionMismatch(n, h.dim()).into());
    }
    Ok(State::normalized(h)?)
}

fn cmd_decay(a: &DecayArgs) -> CmdResult {
    let t = resolve(&a.target)?;
    let n = t.s.dim();
    let spec = a.state.clone().unwrap_or_else(|| format!("random:{}", a.seed));
    let rho0 = initial_state(&spec, n)?;
    if a.t_count < 2 || !(a.t_stop > a.t_start) {
        return Err(fail(EXIT_PARSE, "time grid needs --t-count >= 2 and --t-stop > --t-start"));
    }
    let grid: Vec<f64> = (0..a.t_count)
        .map(|k| a.t_start + (a.t_stop - a.t_start) * k as f64 / (a.t_count - 1) as f64)
        .collect();
    let curve = match decay_curve(&t.s, &t.e, &rho0, &grid) {
        Ok(c) => c,
        Err(e @ (Error::NonMonotone { .. } | Error::DegenerateStart)) => {
            let msg = if matches!(e, Error::DegenerateStart) {
                "initial state is a fixed point (D = 0)".to_string()
            } else {
                e.to_string()
            };
            return Err(fail(EXIT_DECAY, msg));
        }
        Err(e) => return Err(e.into()),
    };
    write_out(a.target.out.as_deref(), &curve.to_csv())?;
    if let Some(b) = t.certified {
        println!("certified_excess={}", fmt_f64(curve.excess_over(b)));
    }
    println!("rows={}", curve.rows.len());
    println!("fitted_rate={}", curve.fitted_rate.map_or("nan".into(), fmt_f64));
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let cfg = BatteryConfig { seed: a.seed, trials: a.trials, dims: a.dims };
    let results = match &a.only {
        Some(name) => vec![run_battery(name, &cfg)?],
        None => run_all(&cfg)?,
    };
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.line());
        for d in &r.detail {
            println!("{}.{}", r.name, d);
        }
        if !r.passed {
            failed.push(r.name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, format!("failed batteries: {}", failed.join(", "))))
    }
}
