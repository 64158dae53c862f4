//! Affine-invariant Riemannian geometry on the cone of HPD matrices.
//!
//! The metric at `A` is `g_A(X, Y) = tr(A⁻¹ X A⁻¹ Y)`. Geodesics, the
//! exponential and logarithm maps and the distance all reduce to spectral
//! functions of the "whitened" matrix `A^{-1/2} B A^{-1/2}`.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::matrix::{checked_powers, EigenDecomposition, HermitianMatrix, HpdMatrix};

/// Relative Frobenius gap under which two base points are the same.
const BASE_MATCH_TOL: f64 = 1e-12;

/// A tangent vector at `base`; the tangent space is H(n).
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    base: HpdMatrix,
    direction: HermitianMatrix,
}

impl TangentVector {
    pub fn new(base: HpdMatrix, direction: HermitianMatrix) -> Result<Self> {
        if base.dim() != direction.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: direction.dim(),
            });
        }
        Ok(Self { base, direction })
    }

    pub fn zero(base: &HpdMatrix) -> Self {
        Self {
            direction: HermitianMatrix::zeros(base.dim()),
            base: base.clone(),
        }
    }

    pub fn base(&self) -> &HpdMatrix {
        &self.base
    }

    pub fn direction(&self) -> &HermitianMatrix {
        &self.direction
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            direction: self.direction.scale(s),
        }
    }

    /// `‖X‖_A = g_A(X, X)^{1/2}`.
    pub fn norm(&self) -> f64 {
        Frame::new(&self.base).norm(&self.direction)
    }
}

/// Precomputed `A^{1/2}` and `A^{-1/2}` for repeated work at one base point.
#[derive(Clone, Debug)]
pub struct Frame {
    base: HpdMatrix,
    sqrt: HpdMatrix,
    inv_sqrt: HpdMatrix,
}

impl Frame {
    pub fn new(base: &HpdMatrix) -> Self {
        Self {
            base: base.clone(),
            sqrt: base.sqrt(),
            inv_sqrt: base.inv_sqrt(),
        }
    }

    pub fn base(&self) -> &HpdMatrix {
        &self.base
    }

    pub fn sqrt(&self) -> &HpdMatrix {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &HpdMatrix {
        &self.inv_sqrt
    }

    /// `A^{-1/2} X A^{-1/2}`.
    pub fn whiten(&self, x: &HermitianMatrix) -> HermitianMatrix {
        x.congruence(self.inv_sqrt.as_complex())
    }

    /// `A^{1/2} X A^{1/2}`.
    pub fn color(&self, x: &HermitianMatrix) -> HermitianMatrix {
        x.congruence(self.sqrt.as_complex())
    }

    /// `ln(A^{-1/2} B A^{-1/2})`, the log map in whitened coordinates.
    pub fn log_whitened(&self, b: &HpdMatrix) -> Result<HermitianMatrix> {
        self.base.check_dim(b)?;
        Ok(HpdMatrix::new(self.whiten(b.as_hermitian()))?.log())
    }

    /// `Log_A(B) = A^{1/2} ln(A^{-1/2} B A^{-1/2}) A^{1/2}`.
    pub fn log(&self, b: &HpdMatrix) -> Result<HermitianMatrix> {
        Ok(self.color(&self.log_whitened(b)?))
    }

    /// `exp_A(X) = A^{1/2} exp(A^{-1/2} X A^{-1/2}) A^{1/2}`.
    pub fn exp(&self, x: &HermitianMatrix) -> Result<HpdMatrix> {
        if x.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base.dim(),
                found: x.dim(),
            });
        }
        let inner = self.whiten(x).exp()?;
        HpdMatrix::new(self.color(inner.as_hermitian()))
    }

    /// `‖X‖_A = ‖A^{-1/2} X A^{-1/2}‖_F`.
    pub fn norm(&self, x: &HermitianMatrix) -> f64 {
        self.whiten(x).frobenius_norm()
    }
}

/// Geodesic `γ(t) = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}` with the
/// whitened spectrum precomputed, so evaluation at many `t` costs one
/// matrix product each.
#[derive(Clone, Debug)]
pub struct GeodesicSegment {
    frame: Frame,
    endpoint_b: HpdMatrix,
    whitened: EigenDecomposition,
}

impl GeodesicSegment {
    pub fn new(a: &HpdMatrix, b: &HpdMatrix) -> Result<Self> {
        a.check_dim(b)?;
        let frame = Frame::new(a);
        let whitened = HpdMatrix::new(frame.whiten(b.as_hermitian()))?;
        Ok(Self {
            whitened: whitened.eigen().clone(),
            frame,
            endpoint_b: b.clone(),
        })
    }

    pub fn endpoint_a(&self) -> &HpdMatrix {
        self.frame.base()
    }

    pub fn endpoint_b(&self) -> &HpdMatrix {
        &self.endpoint_b
    }

    pub fn at(&self, t: f64) -> Result<HpdMatrix> {
        checked_powers(&self.whitened.eigenvalues, t)?;
        let inner = self.whitened.compose(|x| x.powf(t));
        HpdMatrix::new(self.frame.color(&inner))
    }

    /// Samples `γ` at `samples` evenly spaced points of `[0, 1]`.
    pub fn sample(&self, samples: usize) -> Result<Vec<HpdMatrix>> {
        match samples {
            0 => Ok(Vec::new()),
            1 => Ok(vec![self.endpoint_a().clone()]),
            _ => (0..samples)
                .map(|i| self.at(i as f64 / (samples - 1) as f64))
                .collect(),
        }
    }

    /// Length of the segment, `d(A, B)`.
    pub fn length(&self) -> f64 {
        log_norm(&self.whitened.eigenvalues)
    }
}

fn log_norm(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt()
}

fn same_base(a: &HpdMatrix, b: &HpdMatrix) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let gap = (a.as_complex() - b.as_complex()).frobenius_norm();
    gap <= BASE_MATCH_TOL * a.frobenius_norm().max(1.0)
}

/// `g_A(X, Y) = tr(A⁻¹ X A⁻¹ Y)`.
pub fn metric(x: &TangentVector, y: &TangentVector) -> Result<f64> {
    if !same_base(&x.base, &y.base) {
        return Err(Error::BaseMismatch);
    }
    let inv = x.base.inv();
    let ax = inv.as_complex() * x.direction.as_complex();
    let ay = inv.as_complex() * y.direction.as_complex();
    Ok((&ax * &ay).trace().re)
}

pub fn geodesic(a: &HpdMatrix, b: &HpdMatrix, t: f64) -> Result<HpdMatrix> {
    GeodesicSegment::new(a, b)?.at(t)
}

/// `A ∘ B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`.
pub fn midpoint(a: &HpdMatrix, b: &HpdMatrix) -> Result<HpdMatrix> {
    a.check_dim(b)?;
    let frame = Frame::new(a);
    let root = HpdMatrix::new(frame.whiten(b.as_hermitian()))?.sqrt();
    HpdMatrix::new(frame.color(root.as_hermitian()))
}

/// Geodesic distance from the spectrum of `A⁻¹B`.
///
/// With `A = LLᴴ`, `A⁻¹B` is similar to the Hermitian `L⁻¹ B L⁻ᴴ`, so no
/// matrix square root is needed.
pub fn distance(a: &HpdMatrix, b: &HpdMatrix) -> Result<f64> {
    a.check_dim(b)?;
    let chol =
        Cholesky::new(a.as_complex().as_dmatrix().clone()).ok_or(Error::NotPositiveDefinite {
            eigenvalue: a.eigen().min(),
        })?;
    let l = chol.l();
    let left = l
        .solve_lower_triangular(b.as_complex().as_dmatrix())
        .expect("Cholesky factor is invertible");
    let both = l
        .solve_lower_triangular(&left.adjoint())
        .expect("Cholesky factor is invertible");
    let c = HermitianMatrix::symmetrize(crate::matrix::ComplexMatrix::from_dmatrix(both)?);
    let eig = c.eig()?;
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&x| x <= 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: bad });
    }
    Ok(log_norm(&eig.eigenvalues))
}

/// `‖ln(A^{-1/2} B A^{-1/2})‖_F`, through the symmetric square-root form.
pub fn distance_via_sqrt(a: &HpdMatrix, b: &HpdMatrix) -> Result<f64> {
    Ok(Frame::new(a).log_whitened(b)?.frobenius_norm())
}

/// Initial velocity of the geodesic from `a` to `b`.
pub fn log_map(a: &HpdMatrix, b: &HpdMatrix) -> Result<TangentVector> {
    let direction = Frame::new(a).log(b)?;
    Ok(TangentVector {
        base: a.clone(),
        direction,
    })
}

pub fn exp_map(x: &TangentVector) -> Result<HpdMatrix> {
    Frame::new(&x.base).exp(&x.direction)
}
