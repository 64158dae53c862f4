//! Dense complex matrices, Hermitian and Hermitian positive-definite (HPD)
//! wrappers, and spectral matrix functions.
//!
//! Every matrix function here goes through a Hermitian eigendecomposition
//! `A = U diag(λ) Uᴴ`, so `f(A) = U diag(f(λ)) Uᴴ`. The eigensolver is
//! nalgebra's Householder tridiagonalisation followed by implicit QR.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative Hermiticity tolerance accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative positivity floor: `λ_min > PD_TOL * max(1, λ_max)`.
pub const PD_TOL: f64 = 1e-12;
/// Relative bar on `‖UΛUᴴ − A‖_F`.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 10_000;
/// `exp` overflows f64 just above 709.78.
const EXP_OVERFLOW: f64 = 700.0;

/// Square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn from_dmatrix(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    /// Builds an `n×n` matrix from row-major entries.
    pub fn from_row_major(n: usize, entries: &[C64]) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(n, &flat)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: &self.data * C64::new(s, 0.0),
        }
    }

    /// Rows as `Vec<Vec<C64>>`, row-major.
    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

/// `⟨A, B⟩ = tr(Aᴴ B)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.check_dim(b)?;
    Ok(a.data
        .iter()
        .zip(b.data.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm()
}

/// `‖A − Aᴴ‖_F / max(1, ‖A‖_F)`.
pub fn hermitian_residual(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a.data[(i, j)] - a.data[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt() / a.frobenius_norm().max(1.0)
}

/// Complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts `a` if it is Hermitian within [`HERMITIAN_TOL`], then
    /// replaces it with `(A + Aᴴ)/2`.
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        let residual = hermitian_residual(&a);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::symmetrize(a))
    }

    /// Projects onto the Hermitian part without a tolerance check.
    /// Applying it twice is bit-identical to applying it once.
    pub fn symmetrize(mut a: ComplexMatrix) -> Self {
        let n = a.dim();
        for i in 0..n {
            let d = a.data[(i, i)];
            a.data[(i, i)] = C64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let avg = (a.data[(i, j)] + a.data[(j, i)].conj()) * 0.5;
                a.data[(i, j)] = avg;
                a.data[(j, i)] = avg.conj();
            }
        }
        Self { inner: a }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner.get(i, j)
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    /// `C · self · Cᴴ`, re-symmetrised.
    pub fn congruence(&self, c: &ComplexMatrix) -> Self {
        Self::symmetrize(&(c * &self.inner) * &c.adjoint())
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig_hermitian(self)
    }

    /// `f(A)` for a spectral function; fails on eigenvalues outside the
    /// domain of `f`.
    pub fn spectral(&self, f: MatrixFunction) -> Result<HermitianMatrix> {
        let eig = self.eig()?;
        f.check_domain(&eig.eigenvalues)?;
        Ok(eig.compose(|x| f.apply(x)))
    }

    /// Matrix exponential; maps H(n) onto the HPD cone.
    pub fn exp(&self) -> Result<HpdMatrix> {
        herm_exp(self)
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `U diag(f(λ)) Uᴴ`.
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let u = self.eigenvectors.as_dmatrix();
        let n = u.nrows();
        let mut scaled = u.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = C64::new(f(lambda), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        let out = scaled * u.adjoint();
        HermitianMatrix::symmetrize(ComplexMatrix { data: out })
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.compose(|x| x)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Reorders so eigenvalues are descending.
    fn sorted(eigenvalues: Vec<f64>, vectors: DMatrix<C64>) -> Self {
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
        let values = order.iter().map(|&i| eigenvalues[i]).collect();
        let vectors = vectors.select_columns(order.iter());
        Self {
            eigenvalues: values,
            eigenvectors: ComplexMatrix { data: vectors },
        }
    }
}

pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let eig = a
        .inner
        .data
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::NoConvergence {
            iterations: EIGEN_MAX_ITER,
        })?;
    Ok(EigenDecomposition::sorted(
        eig.eigenvalues.iter().copied().collect(),
        eig.eigenvectors,
    ))
}

/// Scalar functions applied through the spectrum of an HPD matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Log,
    Sqrt,
    InvSqrt,
    Inv,
    Pow(f64),
}

impl MatrixFunction {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Self::Log => x.ln(),
            Self::Sqrt => x.sqrt(),
            Self::InvSqrt => 1.0 / x.sqrt(),
            Self::Inv => 1.0 / x,
            Self::Pow(t) => x.powf(t),
        }
    }

    fn check_domain(self, eigenvalues: &[f64]) -> Result<()> {
        match eigenvalues.iter().find(|&&x| x <= 0.0) {
            Some(&eigenvalue) => Err(Error::SpectralDomain { eigenvalue }),
            None => Ok(()),
        }
    }
}

/// Hermitian positive-definite matrix with its eigendecomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct HpdMatrix {
    matrix: HermitianMatrix,
    eig: EigenDecomposition,
}

impl HpdMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let eig = matrix.eig()?;
        check_positive(&eig)?;
        Ok(Self { matrix, eig })
    }

    /// Hermiticity check, symmetrisation and positivity check in one go.
    pub fn from_complex(a: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(a)?)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        Self::from_complex(ComplexMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; n]).expect("identity is HPD")
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(diag))
    }

    /// Builds `U diag(λ) Uᴴ` reusing the supplied spectrum as the cache.
    fn from_spectrum(values: Vec<f64>, vectors: &ComplexMatrix) -> Result<Self> {
        let eig = EigenDecomposition::sorted(values, vectors.data.clone());
        check_positive(&eig)?;
        let matrix = eig.reconstruct();
        Ok(Self { matrix, eig })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        self.matrix.as_complex()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn condition_number(&self) -> f64 {
        self.eig.max() / self.eig.min()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// `f(A)` from the cached spectrum.
    pub fn fun(&self, f: MatrixFunction) -> HermitianMatrix {
        self.eig.compose(|x| f.apply(x))
    }

    fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<HpdMatrix> {
        let values = self.eig.eigenvalues.iter().map(|&x| f(x)).collect();
        Self::from_spectrum(values, &self.eig.eigenvectors)
    }

    pub fn sqrt(&self) -> HpdMatrix {
        self.map_spectrum(f64::sqrt).expect("sqrt of HPD is HPD")
    }

    pub fn inv_sqrt(&self) -> HpdMatrix {
        self.map_spectrum(|x| 1.0 / x.sqrt())
            .expect("inverse sqrt of HPD is HPD")
    }

    pub fn inv(&self) -> HpdMatrix {
        self.map_spectrum(|x| 1.0 / x)
            .expect("inverse of HPD is HPD")
    }

    /// Real power `A^t`. Large `|t|` can push the spectrum past the
    /// positivity floor.
    pub fn pow(&self, t: f64) -> Result<HpdMatrix> {
        let values = checked_powers(&self.eig.eigenvalues, t)?;
        Self::from_spectrum(values, &self.eig.eigenvectors)
    }

    pub fn log(&self) -> HermitianMatrix {
        self.fun(MatrixFunction::Log)
    }

    /// `C A Cᴴ`; HPD whenever `C` is invertible.
    pub fn congruence(&self, c: &ComplexMatrix) -> Result<HpdMatrix> {
        if c.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.dim(),
            });
        }
        HpdMatrix::new(self.matrix.congruence(c))
    }

    pub(crate) fn check_dim(&self, other: &HpdMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

fn check_positive(eig: &EigenDecomposition) -> Result<()> {
    let (max, min) = (eig.max(), eig.min());
    if !(min > PD_TOL * max.max(1.0)) {
        return Err(Error::NotPositiveDefinite { eigenvalue: min });
    }
    Ok(())
}

/// `f(A)` for an HPD matrix, returned as a Hermitian matrix.
pub fn hpd_fun(a: &HpdMatrix, f: MatrixFunction) -> HermitianMatrix {
    a.fun(f)
}

/// `λᵢ^t`, refusing exponents `t·ln λᵢ` outside the range where the result
/// stays finite and nonzero.
pub(crate) fn checked_powers(eigenvalues: &[f64], t: f64) -> Result<Vec<f64>> {
    eigenvalues
        .iter()
        .map(|&x| {
            let exponent = t * x.ln();
            if exponent.abs() > EXP_OVERFLOW {
                Err(Error::Overflow {
                    eigenvalue: exponent,
                })
            } else {
                Ok(x.powf(t))
            }
        })
        .collect()
}

/// Matrix exponential of a Hermitian matrix.
pub fn herm_exp(x: &HermitianMatrix) -> Result<HpdMatrix> {
    let eig = x.eig()?;
    if eig.max() > EXP_OVERFLOW {
        return Err(Error::Overflow {
            eigenvalue: eig.max(),
        });
    }
    let values = eig.eigenvalues.iter().map(|&v| v.exp()).collect();
    HpdMatrix::from_spectrum(values, &eig.eigenvectors)
}
