//! Graph Hörmander generators, graph Lindbladians and conditional expectations,
//! plus the worked matrix systems (Pauli, depolarizing, integer spectrum,
//! collective).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::State;
use crate::graphs::WeightedGraph;
use crate::matfun::hermitian::{c, commutator, max_abs, tau};
use crate::matfun::superop::amplify_outer;
use crate::matfun::{CMat, DoubleOperatorIntegral, HermitianMatrix, ScalarKernel, SpectralSuperoperator, KERNEL_TOL};
use crate::{Error, Result};

/// Largest matrix size accepted by [`collective_lindblad`].
pub const COLLECTIVE_DIM_CAP: usize = 64;
const INTEGER_TOL: f64 = 1e-8;

/// `X_e = |r⟩⟨s| − |s⟩⟨r|` and its Hermitian partner `x_e = i X_e`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeGenerator {
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub antisymmetric: DMatrix<f64>,
    pub hermitian: HermitianMatrix,
}

pub fn edge_generator(r: usize, s: usize, n: usize) -> Result<EdgeGenerator> {
    if !(r < s && s < n) {
        return Err(Error::OutOfRange(format!("edge ({r},{s}) needs 0 <= r < s < {n}")));
    }
    let mut big = DMatrix::zeros(n, n);
    big[(r, s)] = 1.0;
    big[(s, r)] = -1.0;
    let x = HermitianMatrix::new(big.map(|v| Complex64::new(0.0, v))).expect("i times a real antisymmetric matrix is Hermitian");
    Ok(EdgeGenerator { r, s, n, antisymmetric: big, hermitian: x })
}

/// `ρ ↦ Σ_e w_e [x_e, [x_e, ρ]]`, generator-backed with `√w_e · x_e`.
pub fn graph_lindblad(g: &WeightedGraph) -> SpectralSuperoperator {
    let gens = g
        .edges()
        .iter()
        .map(|&(r, s, w)| edge_generator(r, s, g.n()).expect("graph edges are valid").hermitian.into_inner() * c(w.sqrt()))
        .collect();
    SpectralSuperoperator::from_raw_generators(g.n(), gens)
}

/// Trace-preserving conditional expectations on `M_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConditionalExpectation {
    /// Onto the algebra generated by the `{r,s}` block and its complement.
    Edge { n: usize, r: usize, s: usize },
    /// Onto diagonal matrices.
    Diagonal { n: usize },
    /// `x ↦ τ(x)·1`.
    Trace { n: usize },
    /// Hilbert–Schmidt projection onto the span of an orthonormal basis.
    KernelProjection { n: usize, basis: Vec<CMat> },
    /// Schur multiplier by a 0/1 mask that is an equivalence relation.
    Pinching { mask: DMatrix<bool> },
    /// `E ⊗ id` on `M_n ⊗ M_m`.
    Amplified { inner: Box<ConditionalExpectation>, m: usize },
}

impl ConditionalExpectation {
    /// Block pinching from vertex labels: entry `(i, j)` survives iff `labels[i] == labels[j]`.
    pub fn block_pinching(labels: &[usize]) -> Self {
        let n = labels.len();
        ConditionalExpectation::Pinching { mask: DMatrix::from_fn(n, n, |i, j| labels[i] == labels[j]) }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConditionalExpectation::Edge { n, .. }
            | ConditionalExpectation::Diagonal { n }
            | ConditionalExpectation::Trace { n }
            | ConditionalExpectation::KernelProjection { n, .. } => *n,
            ConditionalExpectation::Pinching { mask } => mask.nrows(),
            ConditionalExpectation::Amplified { inner, m } => inner.dim() * m,
        }
    }

    /// Schur mask, for the kinds that are Schur multipliers.
    pub fn mask(&self) -> Option<DMatrix<bool>> {
        match self {
            ConditionalExpectation::Edge { n, r, s } => {
                let inside = |i: usize| i == *r || i == *s;
                Some(DMatrix::from_fn(*n, *n, |i, j| inside(i) == inside(j)))
            }
            ConditionalExpectation::Diagonal { n } => Some(DMatrix::from_fn(*n, *n, |i, j| i == j)),
            ConditionalExpectation::Pinching { mask } => Some(mask.clone()),
            _ => None,
        }
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        match self {
            ConditionalExpectation::Trace { n } => CMat::identity(*n, *n) * tau(x),
            ConditionalExpectation::KernelProjection { n, basis } => basis.iter().fold(CMat::zeros(*n, *n), |acc, b| {
                acc + b * crate::matfun::hs_inner(b, x)
            }),
            ConditionalExpectation::Amplified { inner, m } => amplify_outer(inner.dim(), *m, x, |b| inner.apply(b)),
            other => {
                let mask = other.mask().expect("remaining kinds are Schur multipliers");
                x.zip_map(&mask, |z, keep| if keep { z } else { c(0.0) })
            }
        }
    }

    pub fn apply_herm(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), x.dim()));
        }
        Ok(HermitianMatrix::symmetrized(self.apply(x.as_mat())))
    }

    pub fn amplify(&self, m: usize) -> Self {
        ConditionalExpectation::Amplified { inner: Box::new(self.clone()), m }
    }
}

pub fn edge_expectation(r: usize, s: usize, n: usize) -> Result<ConditionalExpectation> {
    edge_generator(r, s, n)?;
    Ok(ConditionalExpectation::Edge { n, r, s })
}

pub fn diagonal_expectation(n: usize) -> ConditionalExpectation {
    ConditionalExpectation::Diagonal { n }
}

/// Kernel of a generator: its dimension, an orthonormal basis and the projection onto it.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub dim: usize,
    pub basis: Vec<CMat>,
    pub expectation: ConditionalExpectation,
}

/// Eigenvalue-zero eigenspace (threshold 1e-9) of `S`.
///
/// A one-dimensional kernel is reported as the trace expectation; anything
/// larger becomes an explicit kernel projection.
pub fn fixed_point_dim(s: &SpectralSuperoperator) -> FixedPoints {
    let basis = s.kernel_basis();
    let n = s.dim();
    let expectation = if basis.len() == 1 {
        ConditionalExpectation::Trace { n }
    } else {
        ConditionalExpectation::KernelProjection { n, basis: basis.clone() }
    };
    FixedPoints { dim: basis.len(), basis, expectation }
}

/// `(U_i* ρ U_i + ρ)/2` with `U_i = diag(1, …, −1, …, 1)` flipping slot `i`.
pub fn sign_flip_average(i: usize, rho: &CMat) -> Result<CMat> {
    let n = rho.nrows();
    if n < 2 || i >= n - 1 {
        return Err(Error::OutOfRange(format!("sign flip index {i} needs 0 <= i < {}", n.saturating_sub(1))));
    }
    Ok(CMat::from_fn(n, n, |j, k| if (j == i) != (k == i) { c(0.0) } else { rho[(j, k)] }))
}

/// `X`, `Y`, `Z`.
pub fn pauli_matrices() -> [CMat; 3] {
    let i = Complex64::i();
    [
        CMat::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)]),
        CMat::from_row_slice(2, 2, &[c(0.), -i, i, c(0.)]),
        CMat::from_row_slice(2, 2, &[c(1.), c(0.), c(0.), c(-1.)]),
    ]
}

/// `L_a + L_b` on `M₂` with `a = X/2`, `b = Y/2`: rates `(0, 1, 1, 2)` on `(1, X, Y, Z)`.
pub fn pauli_system() -> SpectralSuperoperator {
    let [x, y, _] = pauli_matrices();
    SpectralSuperoperator::from_raw_generators(2, vec![x * c(0.5), y * c(0.5)])
}

/// Orthonormal (`tr(g_k g_l) = δ_kl`) traceless Hermitian basis of `M_n`.
pub fn gell_mann_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(n * n - 1);
    let h = 1.0 / 2f64.sqrt();
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = CMat::zeros(n, n);
            sym[(j, k)] = c(h);
            sym[(k, j)] = c(h);
            out.push(sym);
            let mut asym = CMat::zeros(n, n);
            asym[(j, k)] = Complex64::new(0.0, -h);
            asym[(k, j)] = Complex64::new(0.0, h);
            out.push(asym);
        }
    }
    for l in 1..n {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for j in 0..l {
            d[(j, j)] = c(norm);
        }
        d[(l, l)] = c(-(l as f64) * norm);
        out.push(d);
    }
    out
}

/// `A_n = id − E_τ`.
///
/// Built from the generators `g_k/√(2n)` over a traceless orthonormal basis,
/// since `Σ_k [g_k, [g_k, x]] = 2n (x − τ(x)·1)`.
pub fn depolarizing(n: usize) -> Result<SpectralSuperoperator> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("depolarizing needs n >= 2, got {n}")));
    }
    let s = c(1.0 / (2.0 * n as f64).sqrt());
    Ok(SpectralSuperoperator::from_raw_generators(n, gell_mann_basis(n).into_iter().map(|g| g * s).collect()))
}

/// Single-generator Lindbladian `[x, [x, ·]]` with integer spectrum, and its
/// certified constant `1/(5π²)`.
#[derive(Clone, Debug)]
pub struct IntegerSpectrumLindblad {
    pub superoperator: SpectralSuperoperator,
    pub certified_bound: f64,
}

pub fn integer_spectrum_lindblad(x: &HermitianMatrix) -> Result<IntegerSpectrumLindblad> {
    for l in x.eig().eigenvalues {
        if (l - l.round()).abs() > INTEGER_TOL {
            return Err(Error::OutOfRange(format!("eigenvalue {l} is not an integer")));
        }
    }
    Ok(IntegerSpectrumLindblad {
        superoperator: SpectralSuperoperator::from_raw_generators(x.dim(), vec![x.as_mat().clone()]),
        certified_bound: 1.0 / (5.0 * PI * PI),
    })
}

/// `π_j(a) = 1^{⊗j} ⊗ a ⊗ 1^{⊗(m−1−j)}`.
fn embed(a: &CMat, j: usize, m: usize) -> CMat {
    let d = a.nrows();
    let mut out = CMat::identity(1, 1);
    for site in 0..m {
        out = if site == j { out.kronecker(a) } else { out.kronecker(&CMat::identity(d, d)) };
    }
    out
}

/// `Σ_k Σ_j [π_j(X̂_k), [π_j(X̂_k), ·]]` with `X̂_k = diag(X_k, X_kᵀ)` on `(2n)^m` dimensions.
pub fn collective_lindblad(xs: &[HermitianMatrix], m: usize) -> Result<SpectralSuperoperator> {
    let n = xs.first().map(HermitianMatrix::dim).ok_or_else(|| Error::OutOfRange("empty generator list".into()))?;
    if m == 0 {
        return Err(Error::OutOfRange("need at least one copy".into()));
    }
    let total = (2 * n).checked_pow(m as u32).filter(|&d| d <= COLLECTIVE_DIM_CAP).ok_or_else(|| {
        Error::DimensionCap(format!("(2·{n})^{m} exceeds the collective cap of {COLLECTIVE_DIM_CAP}"))
    })?;
    let mut gens = Vec::with_capacity(xs.len() * m);
    for x in xs {
        if x.dim() != n {
            return Err(Error::DimensionMismatch(n, x.dim()));
        }
        let mut hat = CMat::zeros(2 * n, 2 * n);
        hat.view_mut((0, 0), (n, n)).copy_from(x.as_mat());
        hat.view_mut((n, n), (n, n)).copy_from(&x.as_mat().transpose());
        for j in 0..m {
            gens.push(embed(&hat, j, m));
        }
    }
    Ok(SpectralSuperoperator::from_raw_generators(total, gens))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientRow {
    pub t: f64,
    /// `‖∇P_t a‖²_ρ`
    pub lhs: f64,
    /// `e^{−2λt} ‖∇a‖²_{P_t ρ}`
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub lambda: f64,
    pub rows: Vec<GradientRow>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Residual tolerance of the gradient estimate.
pub const GRADIENT_TOL: f64 = 1e-9;

fn weighted_norm(gradient: &[CMat], rho: &HermitianMatrix) -> Result<f64> {
    let q = DoubleOperatorIntegral::new(rho, rho, &ScalarKernel::Tilt)?;
    Ok(gradient.iter().map(|g| tau(&(g.adjoint() * q.apply(g))).re).sum())
}

/// Check `‖∇P_t a‖²_ρ ≤ e^{−2λt} ‖∇a‖²_{P_t ρ}` on a time grid, where
/// `∇a = (i[a_k, a])_k` and `‖σ‖²_ρ = Σ_k τ(σ_k* Q^ρ_tilt(σ_k))`.
pub fn gradient_estimate_check(
    generators: &[HermitianMatrix],
    lambda: f64,
    rho: &State,
    a: &HermitianMatrix,
    t_grid: &[f64],
) -> Result<GradientReport> {
    let n = rho.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch(n, a.dim()));
    }
    let s = SpectralSuperoperator::from_generators(n, generators)?;
    let i = Complex64::i();
    let grad = |x: &CMat| -> Vec<CMat> { generators.iter().map(|g| commutator(g.as_mat(), x) * i).collect() };
    let grad_a = grad(a.as_mat());
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let pa = s.semigroup_apply(t, a.as_mat())?;
        let lhs = weighted_norm(&grad(&pa), rho.matrix())?;
        let prho = HermitianMatrix::symmetrized(s.semigroup_apply(t, rho.as_mat())?);
        let rhs = (-2.0 * lambda * t).exp() * weighted_norm(&grad_a, &prho)?;
        rows.push(GradientRow { t, lhs, rhs, residual: lhs - rhs });
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(f64::NEG_INFINITY, f64::max);
    Ok(GradientReport { lambda, passed: rows.iter().all(|r| r.residual <= GRADIENT_TOL), max_residual, rows })
}

/// Worst deviation from idempotence, trace preservation and unitality of `e` on `x`.
pub fn expectation_residual(e: &ConditionalExpectation, x: &CMat) -> f64 {
    let n = e.dim();
    let ex = e.apply(x);
    let idem = max_abs(&(e.apply(&ex) - &ex));
    let trace = (tau(&ex) - tau(x)).norm();
    let unital = max_abs(&(e.apply(&CMat::identity(n, n)) - CMat::identity(n, n)));
    idem.max(trace).max(unital)
}

pub fn is_ergodic(s: &SpectralSuperoperator) -> bool {
    s.spectrum().eigenvalues.iter().filter(|l| l.abs() <= KERNEL_TOL).count() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_complex, random_hermitian, random_positive, random_state, seeded};

    #[test]
    fn edge_generator_shape() {
        let e = edge_generator(0, 1, 3).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0., 1., 0., -1., 0., 0., 0., 0., 0.]);
        assert_eq!(e.antisymmetric, want);
        let sq = e.hermitian.as_mat() * e.hermitian.as_mat();
        let want_sq = HermitianMatrix::diag(&[1.0, 1.0, 0.0]);
        assert!((sq - want_sq.as_mat()).norm() < 1e-15);
        let ev = edge_generator(0, 1, 2).unwrap().hermitian.eig().eigenvalues;
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert!(edge_generator(1, 1, 3).is_err() && edge_generator(0, 3, 3).is_err());
    }

    #[test]
    fn k2_spectrum_and_kernel() {
        let s = graph_lindblad(&WeightedGraph::path(2).unwrap());
        let ev = &s.spectrum().eigenvalues;
        for (got, want) in ev.iter().zip([0.0, 0.0, 4.0, 4.0]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
        assert_eq!(fixed_point_dim(&s).dim, 2);
    }

    #[test]
    fn ergodicity_by_connectivity() {
        assert_eq!(fixed_point_dim(&graph_lindblad(&WeightedGraph::complete(3).unwrap())).dim, 1);
        assert_eq!(fixed_point_dim(&graph_lindblad(&WeightedGraph::path(4).unwrap())).dim, 1);
        let split = WeightedGraph::unweighted(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(fixed_point_dim(&graph_lindblad(&split)).dim >= 2);
        assert_eq!(fixed_point_dim(&pauli_system()).dim, 1);
    }

    #[test]
    fn diagonal_restriction_is_twice_the_laplacian() {
        let g = WeightedGraph::new(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (0, 2, 1.5)], None).unwrap();
        let s = graph_lindblad(&g);
        let a = g.generator_matrix();
        for k in 0..4 {
            let mut e = CMat::zeros(4, 4);
            e[(k, k)] = c(1.0);
            let img = s.apply(&e);
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { a[(i, k)] } else { 0.0 };
                    assert!((img[(i, j)] - c(want)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn expectations_are_expectations() {
        let mut rng = seeded(8);
        let g = WeightedGraph::cycle(4).unwrap();
        let mut all = vec![diagonal_expectation(4), ConditionalExpectation::Trace { n: 4 }];
        all.push(ConditionalExpectation::block_pinching(&[0, 0, 1, 1]));
        all.push(fixed_point_dim(&graph_lindblad(&WeightedGraph::unweighted(4, &[(0, 1), (2, 3)]).unwrap())).expectation);
        for &(r, s, _) in g.edges() {
            all.push(edge_expectation(r, s, 4).unwrap());
        }
        for e in &all {
            for _ in 0..5 {
                let x = random_complex(&mut rng, 4, 4);
                assert!(expectation_residual(e, &x) < 1e-10, "{e:?}");
                let p = random_positive(&mut rng, 4, 0.01, 2.0);
                assert!(e.apply_herm(&p).unwrap().min_eigenvalue() > -1e-10);
            }
        }
    }

    #[test]
    fn edge_mask_and_products() {
        let e = edge_expectation(0, 1, 3).unwrap();
        let mask = e.mask().unwrap();
        for (i, j) in [(0, 2), (2, 0), (1, 2), (2, 1)] {
            assert!(!mask[(i, j)]);
        }
        assert!(mask[(0, 1)] && mask[(2, 2)] && mask[(1, 0)]);
        let g = WeightedGraph::cycle(5).unwrap();
        let mut prod = DMatrix::from_element(5, 5, true);
        for &(r, s, _) in g.edges() {
            prod = prod.zip_map(&edge_expectation(r, s, 5).unwrap().mask().unwrap(), |a, b| a && b);
        }
        assert_eq!(prod, diagonal_expectation(5).mask().unwrap());
        let mut rng = seeded(3);
        let x = random_complex(&mut rng, 5, 5);
        let (e1, e2) = (edge_expectation(0, 1, 5).unwrap(), edge_expectation(1, 2, 5).unwrap());
        assert_eq!(e1.apply(&e2.apply(&x)), e2.apply(&e1.apply(&x)));
    }

    #[test]
    fn sign_flips_compose_to_diagonal() {
        let mut rng = seeded(5);
        let x = random_complex(&mut rng, 4, 4);
        let mut y = x.clone();
        for i in 0..3 {
            y = sign_flip_average(i, &y).unwrap();
        }
        assert!((y - diagonal_expectation(4).apply(&x)).norm() < 1e-12);
        let once = sign_flip_average(1, &x).unwrap();
        assert_eq!(once[(1, 1)], x[(1, 1)]);
        assert_eq!(once[(1, 0)], c(0.0));
        assert_eq!(once[(2, 1)], c(0.0));
        assert!(sign_flip_average(3, &x).is_err());
        let d = HermitianMatrix::diag(&[1.0, 2.0, 3.0]);
        assert_eq!(&sign_flip_average(0, d.as_mat()).unwrap(), d.as_mat());
    }

    #[test]
    fn pauli_rates() {
        let s = pauli_system();
        let [x, y, z] = pauli_matrices();
        assert!(s.apply(&CMat::identity(2, 2)).norm() < 1e-15);
        assert!((s.apply(&x) - &x).norm() < 1e-15);
        assert!((s.apply(&y) - &y).norm() < 1e-15);
        assert!((s.apply(&z) - &z * c(2.0)).norm() < 1e-15);
        assert!((s.spectral_gap().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_is_projector_complement() {
        for n in 2..=4 {
            let s = depolarizing(n).unwrap();
            let mut rng = seeded(n as u64);
            let x = random_complex(&mut rng, n, n);
            let want = &x - CMat::identity(n, n) * tau(&x);
            assert!((s.apply(&x) - want).norm() < 1e-12);
            assert!((s.spectral_gap().unwrap() - 1.0).abs() < 1e-12);
            assert!(s.spectrum().max() < 1.0 + 1e-12);
        }
        assert!(depolarizing(1).is_err());
    }

    #[test]
    fn integer_spectrum_rates() {
        let l = integer_spectrum_lindblad(&HermitianMatrix::diag(&[0.0, 1.0])).unwrap();
        let ev = &l.superoperator.spectrum().eigenvalues;
        for (got, want) in ev.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let l3 = integer_spectrum_lindblad(&HermitianMatrix::diag(&[0.0, 1.0, 2.0])).unwrap();
        for got in &l3.superoperator.spectrum().eigenvalues {
            assert!([0.0, 1.0, 4.0].iter().any(|w| (got - w).abs() < 1e-12));
        }
        assert!((l.certified_bound - 0.0202642).abs() < 1e-7);
        assert!(integer_spectrum_lindblad(&HermitianMatrix::diag(&[0.0, 0.5])).is_err());
    }

    #[test]
    fn collective_single_site_is_block_diagonal() {
        let mut rng = seeded(12);
        let x = random_hermitian(&mut rng, 2, 1.0);
        let s = collective_lindblad(std::slice::from_ref(&x), 1).unwrap();
        let lx = SpectralSuperoperator::from_generators(2, std::slice::from_ref(&x)).unwrap();
        let xt = HermitianMatrix::new(x.as_mat().transpose()).unwrap();
        let lbar = SpectralSuperoperator::from_generators(2, &[xt]).unwrap();
        let a = random_complex(&mut rng, 2, 2);
        let b = random_complex(&mut rng, 2, 2);
        let mut blk = CMat::zeros(4, 4);
        blk.view_mut((0, 0), (2, 2)).copy_from(&a);
        blk.view_mut((2, 2), (2, 2)).copy_from(&b);
        let out = s.apply(&blk);
        assert!((out.view((0, 0), (2, 2)) - lx.apply(&a)).norm() < 1e-12);
        assert!((out.view((2, 2), (2, 2)) - lbar.apply(&b)).norm() < 1e-12);
        assert!((lx.spectral_gap().unwrap() - lbar.spectral_gap().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn collective_cap_and_trivial() {
        let [x, y, _] = pauli_matrices();
        let h = |m: CMat| HermitianMatrix::new(m * c(0.5)).unwrap();
        let s = collective_lindblad(&[h(x.clone()), h(y.clone())], 2).unwrap();
        assert_eq!(s.dim(), 16);
        assert!(s.spectral_gap().unwrap() > 0.0);
        assert!(matches!(collective_lindblad(&[h(x)], 4), Err(Error::DimensionCap(_))));
        let triv = collective_lindblad(&[HermitianMatrix::diag(&[0.0])], 2).unwrap();
        assert_eq!(triv.matrix().norm(), 0.0);
    }

    #[test]
    fn gradient_estimate_pauli() {
        let [x, y, _] = pauli_matrices();
        let gens = [HermitianMatrix::new(x * c(0.5)).unwrap(), HermitianMatrix::new(y * c(0.5)).unwrap()];
        let mut rng = seeded(21);
        let rho = random_state(&mut rng, 2, 1.0);
        let a = random_hermitian(&mut rng, 2, 1.0);
        let at0 = gradient_estimate_check(&gens, 1.0, &rho, &a, &[0.0]).unwrap();
        assert!(at0.rows[0].residual.abs() < 1e-14);
        let ok = gradient_estimate_check(&gens, 1.0, &rho, &a, &[0.1, 0.5, 1.0]).unwrap();
        assert!(ok.passed, "{ok:?}");
        let bad = gradient_estimate_check(&gens, 5.0, &rho, &a, &[0.1, 0.5, 1.0]).unwrap();
        assert!(!bad.passed);
    }
}
