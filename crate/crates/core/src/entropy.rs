//! Relative entropies, p-entropies and Fisher informations.
//!
//! All traces are normalized (`τ = tr/n`). Matrix functionals take any
//! positive [`HermitianMatrix`]; [`State`] adds the normalization `τ(ρ) = 1`.

use num_complex::Complex64;

use crate::graphs::WeightedGraph;
use crate::lindblad::ConditionalExpectation;
use crate::matfun::hermitian::{c, commutator, tau, POSITIVITY_FLOOR};
use crate::matfun::quadrature::gauss_legendre;
use crate::matfun::{log, powf, CMat, DoubleOperatorIntegral, HermitianMatrix, ScalarKernel, SpectralSuperoperator};
use crate::{Error, Result};

/// Minimum eigenvalue accepted for a [`State`].
pub const STATE_FLOOR: f64 = 1e-10;
const NORMALIZATION_TOL: f64 = 1e-10;
/// Relative disagreement above which the two Fisher forms are an error.
pub const FISHER_CONSISTENCY_TOL: f64 = 1e-6;

/// Strictly positive matrix with normalized trace 1.
#[derive(Clone, Debug, PartialEq)]
pub struct State(HermitianMatrix);

impl State {
    pub fn new(rho: HermitianMatrix) -> Result<Self> {
        let t = rho.tau();
        if (t - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidState(format!("normalized trace {t}, expected 1")));
        }
        let m = rho.min_eigenvalue();
        if m < STATE_FLOOR {
            return Err(Error::InvalidState(format!("minimum eigenvalue {m:e} below {STATE_FLOOR:e}")));
        }
        Ok(State(rho))
    }

    /// Rescale a positive matrix to `τ = 1`.
    pub fn normalized(rho: HermitianMatrix) -> Result<Self> {
        let t = rho.tau();
        if !(t > 0.0) {
            return Err(Error::InvalidState(format!("normalized trace {t} is not positive")));
        }
        Self::new(rho.scale(1.0 / t))
    }

    /// `n · exp(H) / tr exp(H)`, computed with the top eigenvalue shifted out.
    pub fn from_log(h: &HermitianMatrix) -> Self {
        let e = h.eig();
        let top = e.max();
        let n = h.dim() as f64;
        let z: f64 = e.eigenvalues.iter().map(|l| (l - top).exp()).sum();
        State(e.reconstruct(|l| n * (l - top).exp() / z))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        State(HermitianMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn as_mat(&self) -> &CMat {
        self.0.as_mat()
    }

    pub fn into_inner(self) -> HermitianMatrix {
        self.0
    }
}

impl AsRef<HermitianMatrix> for State {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Relative entropy value; an unsupported reference state gives `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn value(self) -> f64 {
        match self {
            RelEntropy::Finite(v) => v,
            RelEntropy::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RelEntropy::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(v),
            RelEntropy::Infinite => None,
        }
    }
}

fn check_dims(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `τ(ρ ln ρ − ρ ln σ)`, evaluated in the two eigenbases.
///
/// `σ` may be singular; if `ρ` has weight on `ker σ` the value is `Infinite`.
pub fn rel_entropy(rho: &State, sigma: &HermitianMatrix) -> Result<RelEntropy> {
    check_dims(rho.matrix(), sigma)?;
    let n = rho.dim() as f64;
    let er = rho.matrix().eig();
    let es = sigma.eig();
    if es.min() < -POSITIVITY_FLOOR {
        return Err(Error::Domain(es.min()));
    }
    let first: f64 = er.eigenvalues.iter().map(|&l| xlogx(l)).sum();
    // overlap[i][j] = |⟨u_i, v_j⟩|²
    let overlap = er.eigenvectors.adjoint() * &es.eigenvectors;
    let mut second = 0.0;
    for (j, &mu) in es.eigenvalues.iter().enumerate() {
        let weight: f64 = er.eigenvalues.iter().enumerate().map(|(i, &l)| l * overlap[(i, j)].norm_sqr()).sum();
        if mu <= POSITIVITY_FLOOR {
            if weight > POSITIVITY_FLOOR {
                return Ok(RelEntropy::Infinite);
            }
            continue;
        }
        second += weight * mu.ln();
    }
    Ok(RelEntropy::Finite((first - second) / n))
}

/// `τ(ρ ln ρ − ρ ln σ − ρ + σ)` for positive, not necessarily normalized, arguments.
pub fn lindblad_rel_entropy(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let lr = log(rho)?;
    let ls = log(sigma)?;
    let diff = rho.as_mat() * (lr.as_mat() - ls.as_mat()) - rho.as_mat() + sigma.as_mat();
    Ok(tau(&diff).re)
}

/// `D(ρ ‖ E(ρ))`.
pub fn entropy_to_expectation(rho: &State, e: &ConditionalExpectation) -> Result<f64> {
    let image = e.apply_herm(rho.matrix())?;
    let m = image.min_eigenvalue();
    if m <= POSITIVITY_FLOOR {
        return Err(Error::InvalidState(format!("conditional expectation produced eigenvalue {m:e}")));
    }
    match rel_entropy(rho, &image)? {
        RelEntropy::Finite(v) => Ok(v),
        RelEntropy::Infinite => Err(Error::Consistency("E(ρ) is positive definite yet D is infinite".into())),
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::OutOfRange(format!("p must lie in (1, 2), got {p}")));
    }
    Ok(())
}

/// `d^p(ρ‖σ) = τ(ρ^p − σ^p) − p τ((ρ − σ) σ^{p−1})`.
pub fn p_rel_entropy(rho: &HermitianMatrix, sigma: &HermitianMatrix, p: f64) -> Result<f64> {
    check_p(p)?;
    check_dims(rho, sigma)?;
    let rp = powf(rho, p)?;
    let sp = powf(sigma, p)?;
    let sq = powf(sigma, p - 1.0)?;
    let cross = (rho.as_mat() - sigma.as_mat()) * sq.as_mat();
    Ok(rp.tau() - sp.tau() - p * tau(&cross).re)
}

fn positive(rho: &HermitianMatrix) -> Result<()> {
    let m = rho.min_eigenvalue();
    if m <= POSITIVITY_FLOOR {
        return Err(Error::Domain(m));
    }
    Ok(())
}

/// `Σ_k τ(δ_k(ρ) Q^ρ_k(δ_k(ρ)))` with `δ_k = i[a_k, ·]`.
pub fn fisher_doi(generators: &[CMat], rho: &HermitianMatrix, kernel: &ScalarKernel) -> Result<f64> {
    let q = DoubleOperatorIntegral::new(rho, rho, kernel)?;
    let i = Complex64::i();
    let mut total = 0.0;
    for a in generators {
        let d = commutator(a, rho.as_mat()) * i;
        total += tau(&(&d * q.apply(&d))).re;
    }
    Ok(total)
}

fn cross_check(primary: f64, other: f64, what: &str) -> Result<()> {
    let scale = primary.abs().max(other.abs()).max(1e-300);
    if (primary - other).abs() > FISHER_CONSISTENCY_TOL * scale.max(1.0) {
        return Err(Error::Consistency(format!("{what}: τ(Aρ·g) = {primary} but DOI form = {other}")));
    }
    Ok(())
}

/// Entropy production `τ(A(ρ) ln ρ)`; generator-backed operators are
/// cross-checked against the double-operator-integral form.
pub fn fisher_lindblad<R: AsRef<HermitianMatrix>>(s: &SpectralSuperoperator, rho: &R) -> Result<f64> {
    let rho = rho.as_ref();
    positive(rho)?;
    let value = tau(&(s.apply(rho.as_mat()) * log(rho)?.as_mat())).re;
    if let Some(gens) = s.generators() {
        cross_check(value, fisher_doi(gens, rho, &ScalarKernel::LogQuotient)?, "Fisher information")?;
    }
    Ok(value)
}

/// `I^p(ρ) = p τ(A(ρ) ρ^{p−1})`, cross-checked like [`fisher_lindblad`].
pub fn p_fisher<R: AsRef<HermitianMatrix>>(s: &SpectralSuperoperator, rho: &R, p: f64) -> Result<f64> {
    check_p(p)?;
    let rho = rho.as_ref();
    positive(rho)?;
    let value = p * tau(&(s.apply(rho.as_mat()) * powf(rho, p - 1.0)?.as_mat())).re;
    if let Some(gens) = s.generators() {
        let doi = p * fisher_doi(gens, rho, &ScalarKernel::PowerQuotient(p))?;
        cross_check(value, doi, "p-Fisher information")?;
    }
    Ok(value)
}

/// Map from graph vertices to positive `m × m` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    m: usize,
    values: Vec<HermitianMatrix>,
}

impl MatrixField {
    pub fn new(values: Vec<HermitianMatrix>) -> Result<Self> {
        let m = values.first().map(HermitianMatrix::dim).ok_or_else(|| Error::OutOfRange("empty field".into()))?;
        for v in &values {
            if v.dim() != m {
                return Err(Error::DimensionMismatch(m, v.dim()));
            }
            positive(v)?;
        }
        Ok(MatrixField { m, values })
    }

    /// Scalar field (`m = 1`).
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| HermitianMatrix::diag(&[x])).collect())
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[HermitianMatrix] {
        &self.values
    }

    /// `Σ_x μ(x) f(x)`.
    pub fn average(&self, mu: &[f64]) -> HermitianMatrix {
        let mut acc = CMat::zeros(self.m, self.m);
        for (v, &w) in self.values.iter().zip(mu) {
            acc += v.as_mat() * c(w);
        }
        HermitianMatrix::symmetrized(acc)
    }

    pub fn is_normalized(&self, mu: &[f64]) -> bool {
        (self.average(mu).tau() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Block-diagonal embedding `diag(f(0), …, f(n−1))`.
    pub fn block_diagonal(&self) -> HermitianMatrix {
        let (m, k) = (self.m, self.values.len());
        let mut out = CMat::zeros(m * k, m * k);
        for (x, v) in self.values.iter().enumerate() {
            out.view_mut((x * m, x * m), (m, m)).copy_from(v.as_mat());
        }
        HermitianMatrix::symmetrized(out)
    }
}

fn check_field(g: &WeightedGraph, f: &MatrixField) -> Result<()> {
    if f.len() != g.n() {
        return Err(Error::DimensionMismatch(g.n(), f.len()));
    }
    Ok(())
}

/// `Σ_x μ(x) Σ_{y~x} w_xy τ((f(y) − f(x))(ln f(y) − ln f(x)))`, over ordered pairs.
pub fn fisher_graph(g: &WeightedGraph, f: &MatrixField) -> Result<f64> {
    check_field(g, f)?;
    let logs = f.values.iter().map(log).collect::<Result<Vec<_>>>()?;
    let mu = g.measure();
    let mut total = 0.0;
    for &(u, v, w) in g.edges() {
        let df = f.values[v].as_mat() - f.values[u].as_mat();
        let dl = logs[v].as_mat() - logs[u].as_mat();
        total += (mu[u] + mu[v]) * w * tau(&(df * dl)).re;
    }
    Ok(total)
}

/// `Σ_x μ(x) τ(f(x)(ln f(x) − ln ξ))` with `ξ = Σ_x μ(x) f(x)`.
///
/// With `normalized = true` the field must satisfy `τ(ξ) = 1`.
pub fn entropy_graph(g: &WeightedGraph, f: &MatrixField, normalized: bool) -> Result<f64> {
    check_field(g, f)?;
    let mu = g.measure();
    if normalized && !f.is_normalized(mu) {
        return Err(Error::InvalidState(format!("field average has τ = {}", f.average(mu).tau())));
    }
    let xi = f.average(mu);
    let log_xi = log(&xi)?;
    let mut total = 0.0;
    for (v, &w) in f.values.iter().zip(mu) {
        let lv = log(v)?;
        total += w * tau(&(v.as_mat() * (lv.as_mat() - log_xi.as_mat()))).re;
    }
    Ok(total)
}

/// `|∫₀¹ τ((ρ−σ) Q^{g(t)}(ρ−σ)) dt − τ((ρ−σ)(ln ρ − ln σ))|` with `g(t) = (1−t)ρ + tσ`,
/// using a fixed `points`-node Gauss–Legendre rule.
pub fn hook_integral_check(rho: &HermitianMatrix, sigma: &HermitianMatrix, points: usize) -> Result<f64> {
    check_dims(rho, sigma)?;
    let d = rho.as_mat() - sigma.as_mat();
    let rhs = tau(&(&d * (log(rho)?.as_mat() - log(sigma)?.as_mat()))).re;
    let (x, w) = gauss_legendre(points.max(1));
    let mut lhs = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let t = 0.5 * (xi + 1.0);
        let g = HermitianMatrix::symmetrized(rho.as_mat() * c(1.0 - t) + sigma.as_mat() * c(t));
        let q = DoubleOperatorIntegral::new(&g, &g, &ScalarKernel::LogQuotient)?;
        lhs += 0.5 * wi * tau(&(&d * q.apply(&d))).re;
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{depolarizing, pauli_system, ConditionalExpectation};
    use crate::rng::{random_hermitian, random_positive, random_state, seeded};

    const LN15: f64 = 0.4054651081081644;

    fn d15() -> State {
        State::new(HermitianMatrix::diag(&[1.5, 0.5])).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(State::new(HermitianMatrix::diag(&[2.0, 0.5])).is_err());
        assert!(State::new(HermitianMatrix::diag(&[2.0, 0.0])).is_err());
        let s = State::normalized(HermitianMatrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.matrix(), d15().matrix());
        let mut rng = seeded(1);
        let h = random_hermitian(&mut rng, 4, 30.0);
        let st = State::from_log(&h);
        assert!((st.matrix().tau() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rel_entropy_values() {
        let rho = d15();
        assert!(rel_entropy(&rho, rho.matrix()).unwrap().value().abs() < 1e-15);
        let v = rel_entropy(&rho, &HermitianMatrix::identity(2)).unwrap().value();
        let want = (1.5 * LN15 + 0.5 * 0.5f64.ln()) / 2.0;
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.130812).abs() < 1e-6);
        let singular = HermitianMatrix::diag(&[2.0, 0.0]);
        assert_eq!(rel_entropy(&rho, &singular).unwrap(), RelEntropy::Infinite);
    }

    #[test]
    fn lindblad_entropy_values() {
        let id = HermitianMatrix::identity(2);
        assert!(lindblad_rel_entropy(&id, &id).unwrap().abs() < 1e-15);
        let v = lindblad_rel_entropy(&id.scale(2.0), &id).unwrap();
        assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        let mut rng = seeded(2);
        for _ in 0..20 {
            let a = random_positive(&mut rng, 3, 0.1, 4.0);
            let b = random_positive(&mut rng, 3, 0.1, 4.0);
            assert!(lindblad_rel_entropy(&a, &b).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn pinching_closed_form() {
        // ρ = 1 + 0.5 X has eigenvalues 1.5, 0.5 and a maximally mixed diagonal
        let x = CMat::from_row_slice(2, 2, &[c(0.), c(0.5), c(0.5), c(0.)]);
        let rho = State::new(HermitianMatrix::new(CMat::identity(2, 2) + x).unwrap()).unwrap();
        let v = entropy_to_expectation(&rho, &ConditionalExpectation::Diagonal { n: 2 }).unwrap();
        assert!((v - (1.5 * LN15 + 0.5 * 0.5f64.ln()) / 2.0).abs() < 1e-14);
        assert!(entropy_to_expectation(&d15(), &ConditionalExpectation::Diagonal { n: 2 }).unwrap().abs() < 1e-15);
    }

    #[test]
    fn p_entropy_limit_and_value() {
        let rho = d15();
        let id = HermitianMatrix::identity(2);
        let v = p_rel_entropy(rho.matrix(), &id, 1.5).unwrap();
        let want = (1.5f64.powf(1.5) + 0.5f64.powf(1.5)) / 2.0 - 1.0;
        assert!((v - want).abs() < 1e-15);
        let mut rng = seeded(3);
        for _ in 0..10 {
            let a = random_positive(&mut rng, 3, 0.2, 3.0);
            let b = random_positive(&mut rng, 3, 0.2, 3.0);
            let lim = p_rel_entropy(&a, &b, 1.001).unwrap() / 0.001;
            let d = lindblad_rel_entropy(&a, &b).unwrap();
            assert!((lim - d).abs() <= 1e-2 * d.abs().max(1e-3));
        }
        assert!(p_rel_entropy(&id, &id, 2.0).is_err());
        assert!(p_rel_entropy(&id, &id, 1.0).is_err());
    }

    #[test]
    fn depolarizing_fisher_value() {
        let s = depolarizing(2).unwrap();
        let v = fisher_lindblad(&s, &d15()).unwrap();
        let want = (1.5 * LN15 + 0.5 * 0.5f64.ln()) / 2.0 - (LN15 + 0.5f64.ln()) / 2.0;
        assert!((v - want).abs() < 1e-14);
        assert!((v - 0.274653).abs() < 1e-6);
        assert!(fisher_lindblad(&s, &State::maximally_mixed(2)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fisher_forms_agree_and_p_limit() {
        let s = pauli_system();
        let mut rng = seeded(4);
        for _ in 0..10 {
            let rho = random_state(&mut rng, 2, 1.0);
            let a = fisher_lindblad(&s, &rho).unwrap();
            let b = fisher_doi(s.generators().unwrap(), rho.matrix(), &ScalarKernel::LogQuotient).unwrap();
            assert!((a - b).abs() < 1e-8 * a.max(1.0));
            let ip = p_fisher(&s, &rho, 1.001).unwrap() / 0.001;
            assert!((ip - a).abs() <= 1e-2 * a);
        }
    }

    #[test]
    fn graph_functionals() {
        let k2 = WeightedGraph::path(2).unwrap();
        let f = MatrixField::scalar(&[1.0, std::f64::consts::E]).unwrap();
        assert!((fisher_graph(&k2, &f).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        let flat = MatrixField::scalar(&[0.7, 0.7]).unwrap();
        assert_eq!(fisher_graph(&k2, &flat).unwrap(), 0.0);
        assert!(entropy_graph(&k2, &MatrixField::scalar(&[1.0, 1.0]).unwrap(), true).unwrap().abs() < 1e-16);
        let f = MatrixField::scalar(&[1.5, 0.5]).unwrap();
        assert!((entropy_graph(&k2, &f, true).unwrap() - (1.5 * LN15 + 0.5 * 0.5f64.ln()) / 2.0).abs() < 1e-15);
        assert!(entropy_graph(&k2, &MatrixField::scalar(&[3.0, 0.5]).unwrap(), true).is_err());
    }

    #[test]
    fn block_entropy_matches_embedding() {
        let k2 = WeightedGraph::path(2).unwrap();
        let f = MatrixField::new(vec![HermitianMatrix::diag(&[1.5, 0.5]), HermitianMatrix::identity(2)]).unwrap();
        let e = entropy_graph(&k2, &f, true).unwrap();
        // the embedding has normalized trace 1 and E(block) = diag(ξ, ξ)
        let big = State::new(f.block_diagonal()).unwrap();
        let xi = f.average(k2.measure());
        let xi2 = MatrixField::new(vec![xi.clone(), xi]).unwrap().block_diagonal();
        let d = rel_entropy(&big, &xi2).unwrap().value();
        assert!((e - d).abs() < 1e-14);
    }

    #[test]
    fn hook_integral() {
        let id = HermitianMatrix::identity(3);
        assert!(hook_integral_check(&id, &id, 64).unwrap() < 1e-15);
        let a = HermitianMatrix::diag(&[0.2, 1.0, 1.9]);
        let b = HermitianMatrix::diag(&[1.1, 0.3, 0.6]);
        assert!(hook_integral_check(&a, &b, 64).unwrap() < 1e-10);
        let mut rng = seeded(6);
        for _ in 0..5 {
            let a = random_positive(&mut rng, 3, 0.1, 2.0);
            let b = random_positive(&mut rng, 3, 0.1, 2.0);
            assert!(hook_integral_check(&a, &b, 64).unwrap() < 1e-8);
        }
    }
}
