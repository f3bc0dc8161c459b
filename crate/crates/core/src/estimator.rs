//! Numeric MLSI / CpSI estimation by ratio minimization, entropy decay curves
//! and the sandwich harness.
//!
//! States are parametrized as `ρ = n·exp(H)/tr exp(H)`. Every functional is
//! evaluated on the deviation `X = ρ − 1`, which is formed directly from the
//! spectrum of `H` with `expm1`/`ln_1p`. Near the fixed point both `I` and `D`
//! are `O(‖X‖²)`, so this keeps their ratio accurate to ~1e-10 even when
//! `D ≈ 1e-12`, which is where the infimum usually lives.

use rand::Rng;
use serde::Serialize;

use crate::graphs::{certified_bound, lindblad_bound, WeightedGraph};
use crate::lindblad::{graph_lindblad, ConditionalExpectation};
use crate::matfun::hermitian::{c, tau};
use crate::matfun::{CMat, HermitianMatrix, SpectralSuperoperator};
use crate::rng::{random_hermitian, seeded, Rand};
use crate::{entropy::State, Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// States with `D` below this are treated as fixed points.
pub const DEGENERATE_D: f64 = 1e-12;
/// Cap on `‖H‖∞`.
pub const LOG_CAP: f64 = 20.0;
/// Allowed upward excursion of a decay curve.
pub const MONOTONE_TOL: f64 = 1e-10;
const RESAMPLES: usize = 10;
const SPECTRAL_SCALES: [f64; 6] = [0.3, 0.1, 0.03, 0.01, 0.003, 0.001];
const SPECTRAL_DIM_CAP: usize = 16;
const MAX_GAP_VECTORS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { restarts: 200, seed: 0, tol: 1e-8, max_iters: 2000 }
    }
}

impl EstimateOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::OutOfRange(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::OutOfRange("max_iters must be positive".into()));
        }
        Ok(())
    }

    /// Optimizer slack used by the ordering checks.
    pub fn slack(&self) -> f64 {
        1e-6 + self.tol
    }
}

// ---------------------------------------------------------------------------
// accurate scalar pieces

/// `(1+x) ln(1+x) − x`.
fn phi(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        // Σ_{k≥2} (−x)^k / (k(k−1))
        let mut term = x * x;
        let mut sum = 0.0;
        for k in 2..14 {
            sum += term / (k * (k - 1)) as f64;
            term *= -x;
        }
        sum
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// `(1+x)^p − 1 − p x`.
fn psi(x: f64, p: f64) -> f64 {
    if x.abs() < 1e-2 {
        let mut coeff = p * (p - 1.0) / 2.0;
        let mut pow = x * x;
        let mut sum = 0.0;
        for k in 2..14 {
            sum += coeff * pow;
            coeff *= (p - k as f64) / (k + 1) as f64;
            pow *= x;
        }
        sum
    } else {
        (p * x.ln_1p()).exp_m1() - p * x
    }
}

/// `(1+x)^{p−1} − 1`.
fn pow_m1(x: f64, p: f64) -> f64 {
    ((p - 1.0) * x.ln_1p()).exp_m1()
}

fn spectral_map(vals: &[f64], vecs: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| c(f(v)))));
    vecs * d * vecs.adjoint()
}

fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let e = HermitianMatrix::symmetrized(m.clone()).eig();
    (e.eigenvalues, e.eigenvectors)
}

/// Which functional pair is being minimized.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Functional {
    Mlsi,
    Power(f64),
}

/// Numerator, denominator and their quotient at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioParts {
    pub fisher: f64,
    pub entropy: f64,
    pub ratio: f64,
}

/// Ratio from the deviation `X = ρ − 1` and its eigendecomposition.
fn matrix_parts(
    s: &SpectralSuperoperator,
    e: &ConditionalExpectation,
    f: Functional,
    x: &CMat,
    xvals: &[f64],
    xvecs: &CMat,
) -> RatioParts {
    let n = x.nrows() as f64;
    let (yvals, _) = herm_eig(&e.apply(x));
    let lx = s.apply(x);
    let (entropy, fisher) = match f {
        Functional::Mlsi => {
            let d = (xvals.iter().map(|&v| phi(v)).sum::<f64>() - yvals.iter().map(|&v| phi(v)).sum::<f64>()) / n;
            let i = tau(&(&lx * spectral_map(xvals, xvecs, f64::ln_1p))).re;
            (d, i)
        }
        Functional::Power(p) => {
            let d = (xvals.iter().map(|&v| psi(v, p)).sum::<f64>() - yvals.iter().map(|&v| psi(v, p)).sum::<f64>()) / n;
            let i = p * tau(&(&lx * spectral_map(xvals, xvecs, |v| pow_m1(v, p)))).re;
            (d, i)
        }
    };
    RatioParts { fisher, entropy, ratio: fisher / entropy }
}

fn check_operator(s: &SpectralSuperoperator, e: &ConditionalExpectation, n: usize) -> Result<()> {
    if s.dim() != n {
        return Err(Error::DimensionMismatch(s.dim(), n));
    }
    if e.dim() != n {
        return Err(Error::DimensionMismatch(e.dim(), n));
    }
    Ok(())
}

fn state_parts(s: &SpectralSuperoperator, e: &ConditionalExpectation, f: Functional, rho: &State) -> Result<RatioParts> {
    let n = rho.dim();
    check_operator(s, e, n)?;
    let x = rho.as_mat() - CMat::identity(n, n);
    let (vals, vecs) = herm_eig(&x);
    let parts = matrix_parts(s, e, f, &x, &vals, &vecs);
    if !(parts.entropy >= DEGENERATE_D) {
        return Err(Error::DegenerateStart);
    }
    Ok(parts)
}

/// `I(ρ) / D(ρ‖E ρ)`; fails with `DegenerateStart` when `D < 1e-12`.
pub fn mlsi_ratio(s: &SpectralSuperoperator, e: &ConditionalExpectation, rho: &State) -> Result<RatioParts> {
    state_parts(s, e, Functional::Mlsi, rho)
}

/// `I^p(ρ) / d^p(ρ‖E ρ)`.
pub fn cpsi_ratio(s: &SpectralSuperoperator, e: &ConditionalExpectation, p: f64, rho: &State) -> Result<RatioParts> {
    check_p(p)?;
    state_parts(s, e, Functional::Power(p), rho)
}

/// `I(f) / Ent_μ(f)` for a density `f` with `Σ μ f = 1`.
pub fn classical_ratio(g: &WeightedGraph, f: &[f64]) -> Result<RatioParts> {
    if f.len() != g.n() {
        return Err(Error::DimensionMismatch(g.n(), f.len()));
    }
    if let Some(&bad) = f.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::Domain(bad));
    }
    let x: Vec<f64> = f.iter().map(|v| v - 1.0).collect();
    let parts = classical_parts(g, &x);
    if !(parts.entropy >= DEGENERATE_D) {
        return Err(Error::DegenerateStart);
    }
    Ok(parts)
}

fn classical_parts(g: &WeightedGraph, x: &[f64]) -> RatioParts {
    let mu = g.measure();
    let entropy: f64 = mu.iter().zip(x).map(|(m, &v)| m * phi(v)).sum();
    let fisher: f64 = g
        .edges()
        .iter()
        .map(|&(u, v, w)| (mu[u] + mu[v]) * w * (x[v] - x[u]) * (x[v].ln_1p() - x[u].ln_1p()))
        .sum();
    RatioParts { fisher, entropy, ratio: fisher / entropy }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::OutOfRange(format!("p must lie in (1, 2), got {p}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Nelder–Mead

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Downhill simplex (reflection 1, expansion 2, contraction and shrink 1/2).
///
/// The best vertex value never increases. Stops when the spread of values
/// falls below `tol` relative to the best value, when the simplex collapses,
/// or after `max_iters` iterations.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, tol: f64, max_iters: usize) -> Minimum {
    let dim = x0.len();
    let eval = |f: &mut F, x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(&mut f, x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&mut f, &x);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst.is_finite() && (worst - best).abs() <= tol * best.abs().max(1e-300) {
            break;
        }
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let scale = simplex[0].0.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        if diameter <= 1e-15 * scale {
            break;
        }
        iterations += 1;
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (cj, xj) in centroid.iter_mut().zip(x) {
                *cj += xj / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[dim].0).map(|(cj, wj)| cj + t * (cj - wj)).collect()
        };
        let xr = along(1.0);
        let fr = eval(&mut f, &xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&mut f, &xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[dim].1 {
            let xc = along(0.5);
            let fc = eval(&mut f, &xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&mut f, &xc);
            (xc, fc)
        };
        if fc < simplex[dim].1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xj, aj) in x.iter_mut().zip(&anchor) {
                *xj = aj + 0.5 * (*xj - aj);
            }
            *v = eval(&mut f, x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations }
}

// ---------------------------------------------------------------------------
// parametrizations

/// Hermitian `H` from `n²` reals: diagonal first, then `(re, im)` of the upper triangle.
fn params_to_h(p: &[f64], n: usize) -> CMat {
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = c(p[i]);
    }
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = num_complex::Complex64::new(p[k], p[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn h_to_params(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    let mut p: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    for i in 0..n {
        for j in i + 1..n {
            p.push(h[(i, j)].re);
            p.push(h[(i, j)].im);
        }
    }
    p
}

/// `log mean exp`, accurate when every entry is small.
fn log_mean_exp(h: &[f64], weights: &[f64]) -> f64 {
    let top = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top > 1.0 {
        let z: f64 = h.iter().zip(weights).map(|(v, w)| w * (v - top).exp()).sum();
        top + z.ln()
    } else {
        h.iter().zip(weights).map(|(v, w)| w * v.exp_m1()).sum::<f64>().ln_1p()
    }
}

/// Spectrum of `H` centred and clamped to `‖H‖∞ ≤ 20`.
fn clamp_spectrum(h: &mut [f64]) {
    let mean = h.iter().sum::<f64>() / h.len() as f64;
    h.iter_mut().for_each(|v| *v -= mean);
    let norm = h.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if norm > LOG_CAP {
        h.iter_mut().for_each(|v| *v *= LOG_CAP / norm);
    }
}

/// Deviation `X = ρ(H) − 1` together with its eigendecomposition.
fn deviation(h: &CMat) -> (CMat, Vec<f64>, CMat) {
    let n = h.nrows();
    let (mut vals, vecs) = herm_eig(h);
    clamp_spectrum(&mut vals);
    let lme = log_mean_exp(&vals, &vec![1.0 / n as f64; n]);
    let xvals: Vec<f64> = vals.iter().map(|v| (v - lme).exp_m1()).collect();
    let x = spectral_map(&xvals, &vecs, |v| v);
    (HermitianMatrix::symmetrized(x).into_inner(), xvals, vecs)
}

fn classical_deviation(h: &[f64], mu: &[f64]) -> Vec<f64> {
    let mut h = h.to_vec();
    clamp_spectrum(&mut h);
    let lme = log_mean_exp(&h, mu);
    h.iter().map(|v| (v - lme).exp_m1()).collect()
}

/// Value used by the optimizer: the ratio, or `+∞` on the fixed-point set.
fn guarded(parts: RatioParts) -> f64 {
    if parts.entropy >= DEGENERATE_D && parts.ratio.is_finite() {
        parts.ratio
    } else {
        f64::INFINITY
    }
}

fn initial_step(x: &[f64]) -> f64 {
    (0.25 * x.iter().map(|v| v.abs()).fold(0.0, f64::max)).max(1e-4)
}

// ---------------------------------------------------------------------------
// reports

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichBlock {
    pub certified_lower: f64,
    pub numeric_estimate: f64,
    pub gap_upper: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub target: String,
    /// `"mlsi"`, `"cpsi"` or `"classical-mlsi"`.
    pub functional: String,
    pub p: Option<f64>,
    pub value: f64,
    pub fisher: f64,
    pub entropy: f64,
    pub witness: HermitianMatrix,
    pub restarts: usize,
    pub seed: u64,
    pub options: EstimateOptions,
    /// Structured starts first, then the random restarts; `null` for restarts
    /// that never left the fixed-point set.
    pub per_restart_minima: Vec<f64>,
    pub gap_upper: Option<f64>,
    pub sandwich: Option<SandwichBlock>,
}

impl EstimateReport {
    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn labeled(mut self, target: impl Into<String>) -> Self {
        self.target = target.into();
        self
    }

    /// Attach `certified ≤ value ≤ gap_upper` with the option slack.
    pub fn with_sandwich(mut self, certified_lower: f64) -> Self {
        let slack = self.options.slack();
        let gap = self.gap_upper.unwrap_or(f64::INFINITY);
        self.sandwich = Some(SandwichBlock {
            certified_lower,
            numeric_estimate: self.value,
            gap_upper: gap,
            slack,
            holds: certified_lower <= self.value + slack && self.value <= gap + slack,
        });
        self
    }
}

/// Multistart driver shared by every estimator.
///
/// `structured` starts run first, in order; then `opts.restarts` random
/// starts drawn by `sample`. Restart `i` uses the stream `seed ^ i`.
fn multistart<S, O>(structured: &[Vec<f64>], opts: &EstimateOptions, mut sample: S, mut objective: O) -> Result<(Vec<f64>, Vec<f64>)>
where
    S: FnMut(&mut Rand) -> Vec<f64>,
    O: FnMut(&[f64]) -> f64,
{
    opts.validate()?;
    let total = structured.len() + opts.restarts;
    let mut minima = Vec::with_capacity(total);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for i in 0..total {
        let mut rng = seeded(opts.seed ^ i as u64);
        let mut start = if i < structured.len() { structured[i].clone() } else { sample(&mut rng) };
        let mut v0 = objective(&start);
        let mut tries = 0;
        while !v0.is_finite() && tries < RESAMPLES {
            start = sample(&mut rng);
            v0 = objective(&start);
            tries += 1;
        }
        if !v0.is_finite() {
            minima.push(f64::NAN);
            continue;
        }
        let m = nelder_mead(&mut objective, &start, initial_step(&start), opts.tol, opts.max_iters);
        minima.push(m.value);
        if best.as_ref().is_none_or(|(_, v)| m.value < *v) {
            best = Some((m.x, m.value));
        }
    }
    let (x, _) = best.ok_or(Error::DegenerateStart)?;
    Ok((x, minima))
}

/// Hermitian parts of the gap eigenvectors, normalized to `‖·‖∞ = 1`.
fn gap_directions(s: &SpectralSuperoperator) -> Vec<CMat> {
    if s.dim() > SPECTRAL_DIM_CAP {
        return Vec::new();
    }
    let Ok(vecs) = s.gap_eigenvectors() else { return Vec::new() };
    let mut out = Vec::new();
    for v in vecs {
        for part in [(&v + v.adjoint()) * c(0.5), (&v - v.adjoint()) * num_complex::Complex64::new(0.0, -0.5)] {
            let (vals, _) = herm_eig(&part);
            let norm = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if norm > 1e-8 {
                out.push(part * c(1.0 / norm));
                break;
            }
        }
        if out.len() == MAX_GAP_VECTORS {
            break;
        }
    }
    out
}

fn scaled_starts(directions: &[CMat]) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for d in directions {
        for &eps in &SPECTRAL_SCALES {
            for sign in [1.0, -1.0] {
                out.push(h_to_params(&(d * c(sign * eps))));
            }
        }
    }
    out
}

fn random_h_params(rng: &mut Rand, n: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-2.5..0.5));
    h_to_params(random_hermitian(rng, n, scale).as_mat())
}

fn matrix_estimate(
    s: &SpectralSuperoperator,
    e: &ConditionalExpectation,
    f: Functional,
    opts: &EstimateOptions,
    extra_starts: &[CMat],
) -> Result<EstimateReport> {
    let n = s.dim();
    check_operator(s, e, n)?;
    let mut starts: Vec<Vec<f64>> = extra_starts.iter().map(h_to_params).collect();
    starts.extend(scaled_starts(&gap_directions(s)));
    let objective = |p: &[f64]| {
        let (x, xv, xu) = deviation(&params_to_h(p, n));
        guarded(matrix_parts(s, e, f, &x, &xv, &xu))
    };
    let (best, minima) = multistart(&starts, opts, |rng| random_h_params(rng, n), objective)?;
    let (x, _, _) = deviation(&params_to_h(&best, n));
    let witness = HermitianMatrix::symmetrized(x + CMat::identity(n, n));
    let state = State::new(witness.clone())?;
    let parts = state_parts(s, e, f, &state)?;
    let gap_upper = (n <= SPECTRAL_DIM_CAP).then(|| s.spectral_gap().ok().map(|g| 2.0 * g)).flatten();
    let (functional, p) = match f {
        Functional::Mlsi => ("mlsi", None),
        Functional::Power(p) => ("cpsi", Some(p)),
    };
    Ok(EstimateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        target: "custom".into(),
        functional: functional.into(),
        p,
        value: parts.ratio,
        fisher: parts.fisher,
        entropy: parts.entropy,
        witness,
        restarts: opts.restarts,
        seed: opts.seed,
        options: opts.clone(),
        per_restart_minima: minima,
        gap_upper,
        sandwich: None,
    })
}

/// Upper estimate of the MLSI constant `inf_ρ I(ρ)/D(ρ‖E ρ)`.
pub fn mlsi_estimate(s: &SpectralSuperoperator, e: &ConditionalExpectation, opts: &EstimateOptions) -> Result<EstimateReport> {
    matrix_estimate(s, e, Functional::Mlsi, opts, &[])
}

/// Like [`mlsi_estimate`] with extra starting points given as log-densities `H`.
pub fn mlsi_estimate_from(
    s: &SpectralSuperoperator,
    e: &ConditionalExpectation,
    opts: &EstimateOptions,
    starts: &[HermitianMatrix],
) -> Result<EstimateReport> {
    let raw: Vec<CMat> = starts.iter().map(|h| h.as_mat().clone()).collect();
    matrix_estimate(s, e, Functional::Mlsi, opts, &raw)
}

/// Upper estimate of the CpSI constant `inf_ρ I^p(ρ)/d^p(ρ‖E ρ)`.
pub fn cpsi_estimate(s: &SpectralSuperoperator, e: &ConditionalExpectation, p: f64, opts: &EstimateOptions) -> Result<EstimateReport> {
    check_p(p)?;
    matrix_estimate(s, e, Functional::Power(p), opts, &[])
}

/// Largest `m · dim` accepted by [`clsi_probe`].
pub const AMPLIFICATION_CAP: usize = 12;

/// MLSI estimate of `S ⊗ id_{M_m}` against `E ⊗ id`.
///
/// Gap eigenvectors of the amplified operator are `v ⊗ 1`, so the structured
/// starts come from `S` without diagonalizing the larger operator.
pub fn clsi_probe(s: &SpectralSuperoperator, e: &ConditionalExpectation, m: usize, opts: &EstimateOptions) -> Result<EstimateReport> {
    let n = s.dim();
    if m == 0 || n * m > AMPLIFICATION_CAP {
        return Err(Error::DimensionCap(format!("m·n = {}·{} exceeds {AMPLIFICATION_CAP}", m, n)));
    }
    if m == 1 {
        return mlsi_estimate(s, e, opts);
    }
    check_operator(s, e, n)?;
    let big = s.amplify(m);
    let be = e.amplify(m);
    let id = CMat::identity(m, m);
    let mut lifted: Vec<CMat> = Vec::new();
    for d in gap_directions(s) {
        lifted.push(d.kronecker(&id));
    }
    let mut starts = scaled_starts(&lifted);
    // diagonal-only perturbations of the auxiliary factor
    for d in gap_directions(s) {
        let mut aux = CMat::zeros(m, m);
        aux[(0, 0)] = c(1.0);
        starts.push(h_to_params(&(d.kronecker(&aux) * c(0.01))));
    }
    let dim = n * m;
    let objective = |p: &[f64]| {
        let (x, xv, xu) = deviation(&params_to_h(p, dim));
        guarded(matrix_parts(&big, &be, Functional::Mlsi, &x, &xv, &xu))
    };
    let (best, minima) = multistart(&starts, opts, |rng| random_h_params(rng, dim), objective)?;
    let (x, _, _) = deviation(&params_to_h(&best, dim));
    let witness = HermitianMatrix::symmetrized(x + CMat::identity(dim, dim));
    let parts = state_parts(&big, &be, Functional::Mlsi, &State::new(witness.clone())?)?;
    let gap_upper = (n <= SPECTRAL_DIM_CAP).then(|| s.spectral_gap().ok().map(|g| 2.0 * g)).flatten();
    Ok(EstimateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        target: format!("amplified m={m}"),
        functional: "mlsi".into(),
        p: None,
        value: parts.ratio,
        fisher: parts.fisher,
        entropy: parts.entropy,
        witness,
        restarts: opts.restarts,
        seed: opts.seed,
        options: opts.clone(),
        per_restart_minima: minima,
        gap_upper,
        sandwich: None,
    })
}

/// MLSI estimate of the classical graph semigroup over densities `f > 0`, `Σ μ f = 1`.
///
/// The witness is reported as `diag(f)`.
pub fn classical_estimate(g: &WeightedGraph, opts: &EstimateOptions) -> Result<EstimateReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mu = g.measure().to_vec();
    let (vals, vecs) = g.classical_spectrum();
    let gap = vals[1];
    let mut starts = Vec::new();
    for (k, v) in vecs.iter().enumerate().skip(1).take(MAX_GAP_VECTORS) {
        if (vals[k] - gap).abs() > 1e-8 * gap.max(1.0) {
            break;
        }
        let norm = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        for &eps in &SPECTRAL_SCALES {
            for sign in [1.0, -1.0] {
                starts.push(v.iter().map(|x| sign * eps * x / norm).collect());
            }
        }
    }
    let objective = |h: &[f64]| guarded(classical_parts(g, &classical_deviation(h, &mu)));
    let sample = |rng: &mut Rand| {
        let scale = 10f64.powf(rng.random_range(-2.5..0.5));
        crate::rng::normal_vec(rng, n).into_iter().map(|x| scale * x).collect()
    };
    let (best, minima) = multistart(&starts, opts, sample, objective)?;
    let f: Vec<f64> = classical_deviation(&best, &mu).iter().map(|x| 1.0 + x).collect();
    let parts = classical_ratio(g, &f)?;
    Ok(EstimateReport {
        schema_version: REPORT_SCHEMA_VERSION,
        target: "graph".into(),
        functional: "classical-mlsi".into(),
        p: None,
        value: parts.ratio,
        fisher: parts.fisher,
        entropy: parts.entropy,
        witness: HermitianMatrix::diag(&f),
        restarts: opts.restarts,
        seed: opts.seed,
        options: opts.clone(),
        per_restart_minima: minima,
        gap_upper: Some(2.0 * gap),
        sandwich: None,
    })
}

// ---------------------------------------------------------------------------
// decay

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub d: f64,
    pub ln_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCurve {
    pub rows: Vec<DecayRow>,
    /// Minus the least-squares slope of `ln D` over rows with `D > 1e-12`.
    pub fitted_rate: Option<f64>,
}

impl DecayCurve {
    pub fn to_csv(&self) -> String {
        use crate::json::fmt_f64;
        let mut out = String::from("t,D,lnD\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", fmt_f64(r.t), fmt_f64(r.d), fmt_f64(r.ln_d)));
        }
        out
    }

    /// Largest `D(t) − e^{−λt} D(0)` over the grid.
    pub fn excess_over(&self, lambda: f64) -> f64 {
        let Some(first) = self.rows.first() else { return 0.0 };
        self.rows
            .iter()
            .map(|r| r.d - (-lambda * (r.t - first.t)).exp() * first.d)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx)
}

/// `D(T_t ρ₀ ‖ E ρ₀)` over a nondecreasing time grid.
pub fn decay_curve(s: &SpectralSuperoperator, e: &ConditionalExpectation, rho0: &State, t_grid: &[f64]) -> Result<DecayCurve> {
    let n = rho0.dim();
    check_operator(s, e, n)?;
    if let Some(&t) = t_grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::OutOfRange("time grid must be nondecreasing".into()));
    }
    let x0 = rho0.as_mat() - CMat::identity(n, n);
    let d_at = |x: &CMat| {
        let (vals, vecs) = herm_eig(x);
        matrix_parts(s, e, Functional::Mlsi, x, &vals, &vecs).entropy.max(0.0)
    };
    if d_at(&x0) < DEGENERATE_D {
        return Err(Error::DegenerateStart);
    }
    let mut rows: Vec<DecayRow> = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let xt = HermitianMatrix::symmetrized(s.semigroup_apply(t, &x0)?).into_inner();
        let d = d_at(&xt);
        if let Some(prev) = rows.last() {
            if d > prev.d + MONOTONE_TOL {
                return Err(Error::NonMonotone { t, excess: d - prev.d });
            }
        }
        rows.push(DecayRow { t, d, ln_d: d.ln() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.d > DEGENERATE_D).map(|r| (r.t, r.ln_d)).unzip();
    Ok(DecayCurve { fitted_rate: slope(&xs, &ys).map(|s| -s), rows })
}

// ---------------------------------------------------------------------------
// sandwich

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub schema_version: u32,
    pub graph_n: usize,
    pub certified_graph: f64,
    pub certified_lindblad: f64,
    pub classical: EstimateReport,
    pub matrix: EstimateReport,
    pub classical_gap: f64,
    pub lindblad_gap: f64,
    pub slack: f64,
    pub checks: Vec<OrderingCheck>,
    pub passed: bool,
}

impl SandwichReport {
    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }

    /// Names of the violated orderings.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::Consistency(format!("sandwich ordering violated: {}", self.failures().join(", "))))
        }
    }
}

/// Largest graph accepted by [`sandwich_check`].
pub const SANDWICH_MAX_N: usize = 5;

/// Certified bounds against numeric estimates and spectral gaps for one graph.
///
/// Comparing the matrix estimate with the classical one needs the diagonal
/// restriction of the graph Lindbladian to be the classical generator, which
/// holds for the uniform measure.
pub fn sandwich_check(g: &WeightedGraph, opts: &EstimateOptions) -> Result<SandwichReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    if n > SANDWICH_MAX_N {
        return Err(Error::DimensionCap(format!("sandwich check supports n <= {SANDWICH_MAX_N}, got {n}")));
    }
    if !g.is_uniform() {
        return Err(Error::OutOfRange("sandwich check needs the uniform measure".into()));
    }
    let cert = certified_bound(g)?;
    let lambda = cert.bounds.best;
    let lambda_l = lindblad_bound(lambda)?;
    let classical = classical_estimate(g, opts)?.labeled("graph classical");
    let s = graph_lindblad(g);
    let e = ConditionalExpectation::Trace { n };
    // the classical witness, embedded diagonally, is a start for the matrix search
    let log_f: Vec<f64> = (0..n).map(|i| classical.witness.as_mat()[(i, i)].re.ln()).collect();
    let warm = HermitianMatrix::diag(&log_f);
    let matrix = mlsi_estimate_from(&s, &e, opts, &[warm])?.labeled("graph lindbladian");
    let classical_gap = g.classical_gap()?;
    let lindblad_gap = s.spectral_gap()?;
    let slack = opts.slack();
    let check = |name: &str, lhs: f64, rhs: f64| OrderingCheck { name: name.into(), lhs, rhs, holds: lhs <= rhs + slack };
    let checks = vec![
        check("certified-lindblad <= matrix", lambda_l, matrix.value),
        check("matrix <= classical", matrix.value, classical.value),
        check("certified-graph <= classical", lambda, classical.value),
        check("classical <= 2 gap(classical)", classical.value, 2.0 * classical_gap),
        check("matrix <= 2 gap(lindblad)", matrix.value, 2.0 * lindblad_gap),
    ];
    let passed = checks.iter().all(|c| c.holds);
    Ok(SandwichReport {
        schema_version: REPORT_SCHEMA_VERSION,
        graph_n: n,
        certified_graph: lambda,
        certified_lindblad: lambda_l,
        classical: classical.with_sandwich(lambda),
        matrix: matrix.with_sandwich(lambda_l),
        classical_gap,
        lindblad_gap,
        slack,
        checks,
        passed,
    })
}
