//! Chart representation of the affine-invariant metric (the Fisher metric
//! of a parametrised HPD family) and the preconditioned solve used by the
//! natural-gradient iterations.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, HpdMatrix};

/// Largest condition number accepted before a metric is called singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Real symmetric `m×m` matrix `G_ij = tr(A⁻¹ ∂ᵢA A⁻¹ ∂ⱼA)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherMetric {
    g: DMatrix<f64>,
}

impl FisherMetric {
    /// Pulls the metric at `point` back through the chart partials.
    pub fn pullback(point: &HpdMatrix, partials: &[HermitianMatrix]) -> Result<Self> {
        if let Some(p) = partials.iter().find(|p| p.dim() != point.dim()) {
            return Err(Error::DimensionMismatch {
                expected: point.dim(),
                found: p.dim(),
            });
        }
        let inv = point.inv();
        let w: Vec<_> = partials
            .iter()
            .map(|p| inv.as_complex() * p.as_complex())
            .collect();
        let m = partials.len();
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = (&w[i] * &w[j]).trace().re;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(Self { g })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .g
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `λ_max / λ_min`; infinite when `G` is not positive definite.
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Solves `G x = rhs` by Cholesky; never forms `G⁻¹`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rhs.len(),
            });
        }
        let condition = self.condition_number();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::MetricSingular { condition });
        }
        let chol = Cholesky::new(self.g.clone()).ok_or(Error::MetricSingular { condition })?;
        Ok(chol
            .solve(&DVector::from_column_slice(rhs))
            .iter()
            .copied()
            .collect())
    }
}
