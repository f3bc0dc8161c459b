use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::hermitian::{c, eig_hermitian, CMat, HermitianMatrix, SpectralDecomposition, POSITIVITY_FLOOR};
use crate::{Error, Result};

/// Relative gap below which a kernel is evaluated by its diagonal limit.
pub const DIAGONAL_RTOL: f64 = 1e-9;

type OffDiag = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type OnDiag = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Symmetric two-variable kernel on positive reals, with an analytic diagonal.
#[derive(Clone)]
pub enum ScalarKernel {
    /// `(ln x − ln y)/(x − y)`, diagonal `1/x`.
    LogQuotient,
    /// `(x^{p−1} − y^{p−1})/(x − y)`, diagonal `(p−1)x^{p−2}`.
    PowerQuotient(f64),
    /// `(x − y)/(ln x − ln y)`, diagonal `x`.
    Tilt,
    Custom { name: String, off: OffDiag, diag: OnDiag },
}

impl fmt::Debug for ScalarKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKernel::LogQuotient => write!(f, "LogQuotient"),
            ScalarKernel::PowerQuotient(p) => write!(f, "PowerQuotient({p})"),
            ScalarKernel::Tilt => write!(f, "Tilt"),
            ScalarKernel::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl ScalarKernel {
    pub fn custom<F, G>(name: &str, off: F, diag: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarKernel::Custom { name: name.to_string(), off: Arc::new(off), diag: Arc::new(diag) }
    }

    /// First divided difference of `f`, with `fprime` on the diagonal.
    pub fn difference_quotient<F, G>(name: &str, f: F, fprime: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::custom(name, move |x, y| (f(x) - f(y)) / (x - y), fprime)
    }

    fn requires_positive(&self) -> bool {
        !matches!(self, ScalarKernel::Custom { .. })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = x - y;
        if d.abs() < DIAGONAL_RTOL * x.abs().max(y.abs()) || d == 0.0 {
            return self.diagonal(x);
        }
        match self {
            // ln(x/y) via log1p keeps full precision when x ≈ y
            ScalarKernel::LogQuotient => (d / y).ln_1p() / d,
            ScalarKernel::PowerQuotient(p) => {
                let q = p - 1.0;
                y.powf(q) * (q * (d / y).ln_1p()).exp_m1() / d
            }
            ScalarKernel::Tilt => d / (d / y).ln_1p(),
            ScalarKernel::Custom { off, .. } => off(x, y),
        }
    }

    pub fn diagonal(&self, x: f64) -> f64 {
        match self {
            ScalarKernel::LogQuotient => 1.0 / x,
            ScalarKernel::PowerQuotient(p) => (p - 1.0) * x.powf(p - 2.0),
            ScalarKernel::Tilt => x,
            ScalarKernel::Custom { diag, .. } => diag(x),
        }
    }
}

/// Double operator integral `T ↦ Σ k(λ_i, μ_j) P_i T Q_j`, with both spectral
/// decompositions cached so it can be applied repeatedly.
#[derive(Clone, Debug)]
pub struct DoubleOperatorIntegral {
    left: SpectralDecomposition,
    right: SpectralDecomposition,
    weights: DMatrix<f64>,
}

impl DoubleOperatorIntegral {
    pub fn new(rho: &HermitianMatrix, sigma: &HermitianMatrix, kernel: &ScalarKernel) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        let left = eig_hermitian(rho);
        let right = if rho == sigma { left.clone() } else { eig_hermitian(sigma) };
        if kernel.requires_positive() {
            for e in [&left, &right] {
                if e.min() <= POSITIVITY_FLOOR {
                    return Err(Error::Domain(e.min()));
                }
            }
        }
        let n = rho.dim();
        let weights = DMatrix::from_fn(n, n, |i, j| kernel.eval(left.eigenvalues[i], right.eigenvalues[j]));
        Ok(DoubleOperatorIntegral { left, right, weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn apply(&self, t: &CMat) -> CMat {
        let u = &self.left.eigenvectors;
        let v = &self.right.eigenvectors;
        let mut inner = u.adjoint() * t * v;
        inner.zip_apply(&self.weights, |z, w| *z *= c(w));
        u * inner * v.adjoint()
    }

    /// `n²×n²` matrix of the map in the column-stacking convention.
    pub fn superoperator(&self) -> CMat {
        super::superop::matrix_of_map(self.dim(), |t| self.apply(t))
    }
}

/// `U (K ∘ (U* T V)) V*` in the eigenbases of `rho` and `sigma`.
pub fn doi_apply(rho: &HermitianMatrix, sigma: &HermitianMatrix, kernel: &ScalarKernel, t: &CMat) -> Result<CMat> {
    if t.nrows() != rho.dim() || !t.is_square() {
        return Err(Error::DimensionMismatch(rho.dim(), t.nrows()));
    }
    Ok(DoubleOperatorIntegral::new(rho, sigma, kernel)?.apply(t))
}
