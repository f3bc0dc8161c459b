use std::fmt;
use std::sync::{Arc, OnceLock};

use super::hermitian::{c, commutator, eig_raw, max_abs, CMat, HermitianMatrix, SpectralDecomposition};
use crate::{Error, Result};

/// Eigenvalues at or below this magnitude belong to the kernel.
pub const KERNEL_TOL: f64 = 1e-9;

pub type LinearMap = Arc<dyn Fn(&CMat) -> CMat + Send + Sync>;

/// Column-stacking vectorization: entry `(i, j)` lands at `i + j·n`.
pub fn vec_of(m: &CMat) -> CMat {
    CMat::from_column_slice(m.len(), 1, m.as_slice())
}

pub fn unvec(v: &[num_complex::Complex64], n: usize) -> CMat {
    CMat::from_column_slice(n, n, v)
}

/// Dense `n²×n²` matrix of a linear map on `M_n`.
pub fn matrix_of_map<F: Fn(&CMat) -> CMat>(n: usize, f: F) -> CMat {
    let d = n * n;
    let mut out = CMat::zeros(d, d);
    let mut basis = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            basis[(i, j)] = c(1.0);
            let img = f(&basis);
            out.column_mut(i + j * n).copy_from_slice(img.as_slice());
            basis[(i, j)] = c(0.0);
        }
    }
    out
}

#[derive(Clone)]
enum Action {
    /// `ρ ↦ Σ_k [a_k, [a_k, ρ]]`
    Generators(Vec<CMat>),
    Matrix(CMat),
    Map(LinearMap),
}

/// Positive semidefinite, HS-self-adjoint generator on `M_n`.
///
/// The dense `n²×n²` matrix and its eigendecomposition are built on first use
/// and cached; generator-backed operators apply themselves through commutators
/// without ever forming the dense matrix.
pub struct SpectralSuperoperator {
    dim: usize,
    action: Action,
    matrix: OnceLock<CMat>,
    spectrum: OnceLock<SpectralDecomposition>,
}

impl Clone for SpectralSuperoperator {
    fn clone(&self) -> Self {
        SpectralSuperoperator {
            dim: self.dim,
            action: self.action.clone(),
            matrix: self.matrix.clone(),
            spectrum: self.spectrum.clone(),
        }
    }
}

impl fmt::Debug for SpectralSuperoperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.action {
            Action::Generators(g) => format!("generators({})", g.len()),
            Action::Matrix(_) => "matrix".to_string(),
            Action::Map(_) => "map".to_string(),
        };
        f.debug_struct("SpectralSuperoperator").field("dim", &self.dim).field("kind", &kind).finish()
    }
}

impl SpectralSuperoperator {
    fn with_action(dim: usize, action: Action) -> Self {
        SpectralSuperoperator { dim, action, matrix: OnceLock::new(), spectrum: OnceLock::new() }
    }

    /// Lindbladian `Σ_k [a_k, [a_k, ·]]` of Hermitian generators on `M_dim`.
    pub fn from_generators(dim: usize, generators: &[HermitianMatrix]) -> Result<Self> {
        for a in generators {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch(dim, a.dim()));
            }
        }
        Ok(Self::from_raw_generators(dim, generators.iter().map(|a| a.as_mat().clone()).collect()))
    }

    pub(crate) fn from_raw_generators(dim: usize, generators: Vec<CMat>) -> Self {
        Self::with_action(dim, Action::Generators(generators))
    }

    /// Wrap an explicit `n²×n²` matrix; it must be Hermitian.
    pub fn from_matrix(dim: usize, m: CMat) -> Result<Self> {
        if m.nrows() != dim * dim || !m.is_square() {
            return Err(Error::DimensionMismatch(dim * dim, m.nrows()));
        }
        let h = HermitianMatrix::new(m)?.into_inner();
        Ok(Self::with_action(dim, Action::Matrix(h)))
    }

    /// Wrap a linear map; the caller guarantees it is HS-self-adjoint and PSD.
    pub fn from_map<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&CMat) -> CMat + Send + Sync + 'static,
    {
        Self::with_action(dim, Action::Map(Arc::new(f)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> Option<&[CMat]> {
        match &self.action {
            Action::Generators(g) => Some(g),
            _ => None,
        }
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        match &self.action {
            Action::Generators(gens) => {
                let mut out = CMat::zeros(self.dim, self.dim);
                for a in gens {
                    let inner = commutator(a, rho);
                    out += commutator(a, &inner);
                }
                out
            }
            Action::Matrix(m) => unvec((m * vec_of(rho)).as_slice(), self.dim),
            Action::Map(f) => f(rho),
        }
    }

    pub fn matrix(&self) -> &CMat {
        self.matrix.get_or_init(|| match &self.action {
            Action::Generators(gens) => {
                let n = self.dim;
                let id = CMat::identity(n, n);
                let mut m = CMat::zeros(n * n, n * n);
                for a in gens {
                    let a2 = a * a;
                    m += id.kronecker(&a2) + a2.transpose().kronecker(&id) - a.transpose().kronecker(a) * c(2.0);
                }
                m
            }
            Action::Matrix(m) => m.clone(),
            Action::Map(f) => matrix_of_map(self.dim, |x| f(x)),
        })
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.spectrum.get_or_init(|| {
            let m = self.matrix();
            eig_raw(&HermitianMatrix::symmetrized(m.clone()).into_inner())
        })
    }

    /// `e^{−tS}ρ` through the cached eigenbasis.
    pub fn semigroup_apply(&self, t: f64, rho: &CMat) -> Result<CMat> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        Ok(self.propagate(t, rho))
    }

    /// `e^{−tS}ρ` for any real `t`; negative times run the flow backwards.
    pub fn propagate(&self, t: f64, rho: &CMat) -> CMat {
        if t == 0.0 {
            return rho.clone();
        }
        let e = self.spectrum();
        let v = &e.eigenvectors;
        let mut coeffs = v.adjoint() * vec_of(rho);
        for (k, lam) in e.eigenvalues.iter().enumerate() {
            coeffs[k] *= c((-t * lam).exp());
        }
        unvec((v * coeffs).as_slice(), self.dim)
    }

    /// Smallest eigenvalue above [`KERNEL_TOL`].
    pub fn spectral_gap(&self) -> Result<f64> {
        self.spectrum().eigenvalues.iter().copied().find(|&l| l > KERNEL_TOL).ok_or(Error::DegenerateGenerator)
    }

    /// Eigenvectors of the gap eigenvalue, as matrices (HS-orthonormal).
    pub fn gap_eigenvectors(&self) -> Result<Vec<CMat>> {
        let gap = self.spectral_gap()?;
        let e = self.spectrum();
        Ok(e.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| (l - gap).abs() <= 1e-8 * gap.max(1.0))
            .map(|(k, _)| unvec(e.eigenvectors.column(k).as_slice(), self.dim))
            .collect())
    }

    /// HS-orthonormal basis (unnormalized trace) of the kernel.
    pub fn kernel_basis(&self) -> Vec<CMat> {
        let e = self.spectrum();
        e.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l.abs() <= KERNEL_TOL)
            .map(|(k, _)| unvec(e.eigenvectors.column(k).as_slice(), self.dim))
            .collect()
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        let m = self.matrix();
        max_abs(&(m - m.adjoint()))
    }

    pub fn unitality_residual(&self) -> f64 {
        max_abs(&self.apply(&CMat::identity(self.dim, self.dim)))
    }

    /// `S ⊗ id_{M_m}` on `M_n ⊗ M_m` (the `M_n` index is the outer one).
    pub fn amplify(&self, m: usize) -> SpectralSuperoperator {
        let n = self.dim;
        match &self.action {
            Action::Generators(gens) => {
                let id = CMat::identity(m, m);
                Self::from_raw_generators(n * m, gens.iter().map(|a| a.kronecker(&id)).collect())
            }
            _ => {
                let inner = self.clone();
                Self::from_map(n * m, move |rho| amplify_outer(n, m, rho, |b| inner.apply(b)))
            }
        }
    }

    /// `S₁ ⊗ id + id ⊗ S₂` on `M_{n₁} ⊗ M_{n₂}`.
    pub fn tensor_sum(a: &SpectralSuperoperator, b: &SpectralSuperoperator) -> SpectralSuperoperator {
        let (n1, n2) = (a.dim, b.dim);
        if let (Some(ga), Some(gb)) = (a.generators(), b.generators()) {
            let (i1, i2) = (CMat::identity(n1, n1), CMat::identity(n2, n2));
            let mut gens: Vec<CMat> = ga.iter().map(|x| x.kronecker(&i2)).collect();
            gens.extend(gb.iter().map(|y| i1.kronecker(y)));
            return Self::from_raw_generators(n1 * n2, gens);
        }
        let (a, b) = (a.clone(), b.clone());
        Self::from_map(n1 * n2, move |rho| {
            amplify_outer(n1, n2, rho, |x| a.apply(x)) + amplify_inner(n1, n2, rho, |y| b.apply(y))
        })
    }
}

/// Apply `f` on the outer `M_n` factor of `ρ ∈ M_n ⊗ M_m`.
pub(crate) fn amplify_outer<F: Fn(&CMat) -> CMat>(n: usize, m: usize, rho: &CMat, f: F) -> CMat {
    let mut out = CMat::zeros(n * m, n * m);
    for alpha in 0..m {
        for beta in 0..m {
            let block = CMat::from_fn(n, n, |i, j| rho[(i * m + alpha, j * m + beta)]);
            let img = f(&block);
            for i in 0..n {
                for j in 0..n {
                    out[(i * m + alpha, j * m + beta)] = img[(i, j)];
                }
            }
        }
    }
    out
}

/// Apply `f` on the inner `M_m` factor of `ρ ∈ M_n ⊗ M_m`.
pub(crate) fn amplify_inner<F: Fn(&CMat) -> CMat>(n: usize, m: usize, rho: &CMat, f: F) -> CMat {
    let mut out = CMat::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = rho.view((i * m, j * m), (m, m)).clone_owned();
            out.view_mut((i * m, j * m), (m, m)).copy_from(&f(&block));
        }
    }
    out
}

pub fn superop_from_generators(dim: usize, generators: &[HermitianMatrix]) -> Result<SpectralSuperoperator> {
    SpectralSuperoperator::from_generators(dim, generators)
}

pub fn semigroup_apply(s: &SpectralSuperoperator, t: f64, rho: &CMat) -> Result<CMat> {
    s.semigroup_apply(t, rho)
}

pub fn spectral_gap(s: &SpectralSuperoperator) -> Result<f64> {
    s.spectral_gap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::hermitian::tau;
    use crate::rng::{random_hermitian, random_positive, seeded};
    use num_complex::Complex64;

    fn paulis() -> [CMat; 3] {
        let i = Complex64::i();
        [
            CMat::from_row_slice(2, 2, &[c(0.), c(1.), c(1.), c(0.)]),
            CMat::from_row_slice(2, 2, &[c(0.), -i, i, c(0.)]),
            CMat::from_row_slice(2, 2, &[c(1.), c(0.), c(0.), c(-1.)]),
        ]
    }

    fn half(m: &CMat) -> HermitianMatrix {
        HermitianMatrix::new(m * c(0.5)).unwrap()
    }

    #[test]
    fn vectorization_convention() {
        let mut rng = seeded(2);
        let a = crate::rng::random_complex(&mut rng, 3, 3);
        let b = crate::rng::random_complex(&mut rng, 3, 3);
        let rho = crate::rng::random_complex(&mut rng, 3, 3);
        let lhs = vec_of(&(&a * &rho * &b));
        let rhs = b.transpose().kronecker(&a) * vec_of(&rho);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn z_dephasing_rates() {
        let [_, _, z] = paulis();
        let s = SpectralSuperoperator::from_generators(2, &[half(&z)]).unwrap();
        let ev = &s.spectrum().eigenvalues;
        let want = [0.0, 0.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_pair_rates_on_basis() {
        let [x, y, z] = paulis();
        let s = SpectralSuperoperator::from_generators(2, &[half(&x), half(&y)]).unwrap();
        let id = CMat::identity(2, 2);
        assert!(s.apply(&id).norm() < 1e-14);
        assert!((s.apply(&x) - &x).norm() < 1e-14);
        assert!((s.apply(&y) - &y).norm() < 1e-14);
        assert!((s.apply(&z) - &z * c(2.0)).norm() < 1e-14);
        // dense path agrees with the commutator path
        let dense = SpectralSuperoperator::from_matrix(2, s.matrix().clone()).unwrap();
        assert!((dense.apply(&z) - s.apply(&z)).norm() < 1e-14);
        assert!((s.spectral_gap().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_generator_list_is_zero() {
        let s = SpectralSuperoperator::from_generators(3, &[]).unwrap();
        assert!(s.matrix().norm() == 0.0);
        assert!(matches!(s.spectral_gap(), Err(Error::DegenerateGenerator)));
    }

    #[test]
    fn invariants_on_random_generators() {
        let mut rng = seeded(4);
        for n in 2..=4 {
            let gens: Vec<_> = (0..3).map(|_| random_hermitian(&mut rng, n, 1.0)).collect();
            let s = SpectralSuperoperator::from_generators(n, &gens).unwrap();
            assert!(s.self_adjoint_residual() < 1e-10);
            assert!(s.unitality_residual() < 1e-10);
            assert!(s.spectrum().min() > -1e-10);
            let rho = random_positive(&mut rng, n, 0.1, 3.0);
            for t in [0.0, 0.3, 2.0, 10.0] {
                let out = s.semigroup_apply(t, rho.as_mat()).unwrap();
                assert!((tau(&out) - tau(rho.as_mat())).norm() < 1e-10);
                assert!(HermitianMatrix::symmetrized(out).min_eigenvalue() > -1e-10);
            }
        }
    }

    #[test]
    fn semigroup_pauli_and_long_time_limit() {
        let [x, y, z] = paulis();
        let s = SpectralSuperoperator::from_generators(2, &[half(&x), half(&y)]).unwrap();
        assert_eq!(s.semigroup_apply(0.0, &x).unwrap(), x);
        let out = s.semigroup_apply(1.0, &x).unwrap();
        assert!((out - &x * c((-1.0f64).exp())).norm() < 1e-12);
        // t → ∞ projects onto the kernel
        let rho = CMat::identity(2, 2) + &z * c(0.3) + &x * c(0.2);
        let limit = s.semigroup_apply(50.0, &rho).unwrap();
        let proj = s
            .kernel_basis()
            .iter()
            .fold(CMat::zeros(2, 2), |acc, b| acc + b * crate::matfun::hermitian::hs_inner(b, &rho));
        assert!((limit - proj).norm() < 1e-8);
        assert!(matches!(s.semigroup_apply(-1.0, &x), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn amplification_and_tensor_sum() {
        let [x, y, _] = paulis();
        let s = SpectralSuperoperator::from_generators(2, &[half(&x), half(&y)]).unwrap();
        let amp = s.amplify(2);
        assert_eq!(amp.kernel_basis().len(), 4);
        let map_based = SpectralSuperoperator::from_map(2, {
            let s = s.clone();
            move |r| s.apply(r)
        });
        let amp2 = map_based.amplify(2);
        assert!((amp.matrix() - amp2.matrix()).norm() < 1e-12);
        let ts = SpectralSuperoperator::tensor_sum(&s, &map_based);
        let tg = SpectralSuperoperator::tensor_sum(&s, &s);
        assert!((ts.matrix() - tg.matrix()).norm() < 1e-12);
        assert_eq!(tg.kernel_basis().len(), 1);
    }
}
