use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense complex matrix, column-major.
pub type CMat = DMatrix<Complex64>;

/// Symmetry tolerance for [`HermitianMatrix::new`], scaled by the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues at or below this value are rejected by `ln` and powers.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A conjugate-symmetric square matrix.
///
/// Construction symmetrizes the input exactly, so every downstream spectral
/// routine sees a bit-exact Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let asym = max_abs(&(&m - m.adjoint()));
        let scale = max_abs(&m).max(1.0);
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::symmetrized(m))
    }

    /// Hermitian part `(m + m*)/2`, without validation.
    pub fn symmetrized(m: CMat) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj) * c(0.5))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(c))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        HermitianMatrix(CMat::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { c(0.0) }))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    /// Normalized trace `tr(x)/n`.
    pub fn tau(&self) -> f64 {
        tau(&self.0).re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(&self.0 * c(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    pub fn eig(&self) -> SpectralDecomposition {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().eigenvalues[0]
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        mat_to_pairs(&self.0)
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        Self::new(mat_from_pairs(rows)?)
    }
}

impl AsRef<HermitianMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        self
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        HermitianMatrix::from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}

pub fn mat_to_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn mat_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    for r in rows {
        if r.len() != n {
            return Err(Error::DimensionMismatch(n, r.len()));
        }
    }
    Ok(CMat::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Normalized trace of an arbitrary square matrix.
pub fn tau(m: &CMat) -> Complex64 {
    m.trace() / c(m.nrows() as f64)
}

/// `ab - ba`
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Hilbert–Schmidt inner product `tr(a* b)` (unnormalized).
pub fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvalues in ascending order with a unitary matrix of eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    /// `U diag(f(λ)) U*`
    pub fn reconstruct<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let u = &self.eigenvectors;
        let n = u.nrows();
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = c(f(lam));
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        HermitianMatrix::symmetrized(scaled * u.adjoint())
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

pub(crate) fn eig_raw(m: &CMat) -> SpectralDecomposition {
    let n = m.nrows();
    if n == 0 {
        return SpectralDecomposition { eigenvalues: vec![], eigenvectors: CMat::zeros(0, 0) };
    }
    let se = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let eigenvectors = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    SpectralDecomposition { eigenvalues, eigenvectors }
}

pub fn eig_hermitian(h: &HermitianMatrix) -> SpectralDecomposition {
    eig_raw(h.as_mat())
}

/// Validating entry point for raw matrices.
pub fn eig_checked(m: &CMat) -> Result<SpectralDecomposition> {
    Ok(eig_hermitian(&HermitianMatrix::new(m.clone())?))
}

/// `U f(diag λ) U*` with no domain restriction.
pub fn matrix_function<F: Fn(f64) -> f64>(h: &HermitianMatrix, f: F) -> HermitianMatrix {
    h.eig().reconstruct(f)
}

fn check_floor(eig: &SpectralDecomposition) -> Result<()> {
    let m = eig.min();
    if m <= POSITIVITY_FLOOR {
        return Err(Error::Domain(m));
    }
    Ok(())
}

pub fn log(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = h.eig();
    check_floor(&e)?;
    Ok(e.reconstruct(f64::ln))
}

pub fn powf(h: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let e = h.eig();
    check_floor(&e)?;
    Ok(e.reconstruct(|x| x.powf(p)))
}

pub fn exp(h: &HermitianMatrix) -> HermitianMatrix {
    matrix_function(h, f64::exp)
}
