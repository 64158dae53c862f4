//! Parametrised HPD matrix systems `u ↦ A(u)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{frobenius_inner, ComplexMatrix, HermitianMatrix, HpdMatrix, C64};

/// Relative step for central-difference partials: `h = FD_STEP·max(1,|uⁱ|)`.
pub const FD_STEP: f64 = 1e-6;

/// A chart `u ∈ Θ ⊂ ℝᵐ ↦ A(u) ∈ P(n)` onto an output submanifold.
pub trait ParamSystem: Sync {
    /// Matrix dimension `n`.
    fn dim(&self) -> usize;

    /// Parameter count `m`.
    fn n_params(&self) -> usize;

    fn in_domain(&self, u: &[f64]) -> bool;

    /// `A(u)` without the domain or positivity check.
    fn raw_output(&self, u: &[f64]) -> HermitianMatrix;

    fn output(&self, u: &[f64]) -> Result<HpdMatrix> {
        self.check_params(u)?;
        if !self.in_domain(u) {
            return Err(Error::DomainExit(u.to_vec()));
        }
        HpdMatrix::new(self.raw_output(u))
    }

    /// `∂A/∂uⁱ` at `u`. Defaults to central differences.
    fn partials(&self, u: &[f64]) -> Result<Vec<HermitianMatrix>> {
        self.check_params(u)?;
        Ok(central_difference_partials(self, u))
    }

    /// Recovers coordinates from a matrix, if the chart can be inverted.
    fn chart_inverse(&self, _a: &HermitianMatrix) -> Option<Vec<f64>> {
        None
    }

    fn coord_labels(&self) -> Vec<String> {
        (1..=self.n_params()).map(|i| format!("u_{i}")).collect()
    }

    fn check_params(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_params() {
            return Err(Error::ParameterCount {
                expected: self.n_params(),
                found: u.len(),
            });
        }
        Ok(())
    }
}

/// Central differences with step `FD_STEP·max(1,|uⁱ|)`, symmetrised.
pub fn central_difference_partials<S: ParamSystem + ?Sized>(
    system: &S,
    u: &[f64],
) -> Vec<HermitianMatrix> {
    (0..u.len())
        .map(|i| {
            let h = FD_STEP * u[i].abs().max(1.0);
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[i] += h;
            down[i] -= h;
            let diff = system.raw_output(&up).sub(&system.raw_output(&down));
            HermitianMatrix::symmetrize(diff.into_complex().scale(0.5 / h))
        })
        .collect()
}

/// Chart inverse of `a` plus the relative round-trip residual
/// `‖A(u) − a‖_F / max(1, ‖a‖_F)`. Infinite residual when the recovered
/// coordinates fall outside the domain.
pub fn chart_residual<S: ParamSystem + ?Sized>(
    system: &S,
    a: &HermitianMatrix,
) -> Option<(Vec<f64>, f64)> {
    let u = system.chart_inverse(a)?;
    if u.len() != system.n_params() || !system.in_domain(&u) {
        return Some((u, f64::INFINITY));
    }
    let back = system.raw_output(&u);
    let residual = back.sub(a).frobenius_norm() / a.frobenius_norm().max(1.0);
    Some((u, residual))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `A(u) = [[u¹, i·u³], [−i·u³, u²]]` on `u¹ > 0, u¹u² − (u³)² > 0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CouplingSystem;

impl ParamSystem for CouplingSystem {
    fn dim(&self) -> usize {
        2
    }

    fn n_params(&self) -> usize {
        3
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u.len() == 3 && u[0] > 0.0 && u[0] * u[1] - u[2] * u[2] > 0.0
    }

    fn raw_output(&self, u: &[f64]) -> HermitianMatrix {
        let m = ComplexMatrix::from_row_major(
            2,
            &[c(u[0], 0.0), c(0.0, u[2]), c(0.0, -u[2]), c(u[1], 0.0)],
        )
        .expect("2x2 output");
        HermitianMatrix::symmetrize(m)
    }

    fn partials(&self, u: &[f64]) -> Result<Vec<HermitianMatrix>> {
        self.check_params(u)?;
        let coupling = ComplexMatrix::from_row_major(
            2,
            &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)],
        )
        .expect("2x2 partial");
        Ok(vec![
            HermitianMatrix::from_real_diagonal(&[1.0, 0.0]),
            HermitianMatrix::from_real_diagonal(&[0.0, 1.0]),
            HermitianMatrix::symmetrize(coupling),
        ])
    }

    fn chart_inverse(&self, a: &HermitianMatrix) -> Option<Vec<f64>> {
        (a.dim() == 2).then(|| vec![a.get(0, 0).re, a.get(1, 1).re, a.get(0, 1).im])
    }
}

/// `A(u) = diag(u¹, …, uⁿ)` on `uⁱ > 0`.
#[derive(Clone, Copy, Debug)]
pub struct DiagonalSystem {
    n: usize,
}

impl DiagonalSystem {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        Self { n }
    }
}

impl ParamSystem for DiagonalSystem {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_params(&self) -> usize {
        self.n
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u.len() == self.n && u.iter().all(|&x| x > 0.0)
    }

    fn raw_output(&self, u: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(u)
    }

    fn partials(&self, u: &[f64]) -> Result<Vec<HermitianMatrix>> {
        self.check_params(u)?;
        Ok((0..self.n)
            .map(|i| {
                let mut e = vec![0.0; self.n];
                e[i] = 1.0;
                HermitianMatrix::from_real_diagonal(&e)
            })
            .collect())
    }

    fn chart_inverse(&self, a: &HermitianMatrix) -> Option<Vec<f64>> {
        (a.dim() == self.n).then(|| (0..self.n).map(|i| a.get(i, i).re).collect())
    }
}

/// `A(u) = offset + Σ uⁱ Eⁱ` on the set where `A(u)` is HPD.
///
/// The chart inverse is the least-squares projection onto the span of the
/// basis in the real Frobenius inner product.
#[derive(Clone, Debug)]
pub struct AffineSystem {
    offset: HermitianMatrix,
    basis: Vec<HermitianMatrix>,
    gram: DMatrix<f64>,
}

impl AffineSystem {
    pub fn new(offset: HermitianMatrix, basis: Vec<HermitianMatrix>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidParameter(
                "affine system needs a basis".into(),
            ));
        }
        if let Some(b) = basis.iter().find(|b| b.dim() != offset.dim()) {
            return Err(Error::DimensionMismatch {
                expected: offset.dim(),
                found: b.dim(),
            });
        }
        let m = basis.len();
        let gram = DMatrix::from_fn(m, m, |i, j| {
            frobenius_inner(basis[i].as_complex(), basis[j].as_complex())
                .expect("same dimension")
                .re
        });
        let ev = gram.clone().symmetric_eigenvalues();
        if !(ev.min() > 1e-12 * ev.max()) {
            return Err(Error::InvalidParameter(
                "affine basis matrices are linearly dependent".into(),
            ));
        }
        Ok(Self {
            offset,
            basis,
            gram,
        })
    }

    pub fn offset(&self) -> &HermitianMatrix {
        &self.offset
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        &self.basis
    }
}

impl ParamSystem for AffineSystem {
    fn dim(&self) -> usize {
        self.offset.dim()
    }

    fn n_params(&self) -> usize {
        self.basis.len()
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u.len() == self.basis.len()
            && u.iter().all(|x| x.is_finite())
            && HpdMatrix::new(self.raw_output(u)).is_ok()
    }

    fn raw_output(&self, u: &[f64]) -> HermitianMatrix {
        self.basis
            .iter()
            .zip(u)
            .fold(self.offset.clone(), |acc, (e, &x)| acc.add(&e.scale(x)))
    }

    fn partials(&self, u: &[f64]) -> Result<Vec<HermitianMatrix>> {
        self.check_params(u)?;
        Ok(self.basis.clone())
    }

    fn chart_inverse(&self, a: &HermitianMatrix) -> Option<Vec<f64>> {
        if a.dim() != self.dim() {
            return None;
        }
        let shifted = a.sub(&self.offset);
        let rhs = DVector::from_iterator(
            self.basis.len(),
            self.basis.iter().map(|e| {
                frobenius_inner(e.as_complex(), shifted.as_complex())
                    .expect("same dimension")
                    .re
            }),
        );
        let chol = self.gram.clone().cholesky()?;
        Some(chol.solve(&rhs).iter().copied().collect())
    }
}

/// A system defined by closures; partials come from central differences.
pub struct ClosureSystem<F, D>
where
    F: Fn(&[f64]) -> HermitianMatrix + Sync,
    D: Fn(&[f64]) -> bool + Sync,
{
    n: usize,
    m: usize,
    output: F,
    domain: D,
}

impl<F, D> ClosureSystem<F, D>
where
    F: Fn(&[f64]) -> HermitianMatrix + Sync,
    D: Fn(&[f64]) -> bool + Sync,
{
    pub fn new(n: usize, m: usize, output: F, domain: D) -> Self {
        Self {
            n,
            m,
            output,
            domain,
        }
    }
}

impl<F, D> ParamSystem for ClosureSystem<F, D>
where
    F: Fn(&[f64]) -> HermitianMatrix + Sync,
    D: Fn(&[f64]) -> bool + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn n_params(&self) -> usize {
        self.m
    }

    fn in_domain(&self, u: &[f64]) -> bool {
        u.len() == self.m && (self.domain)(u)
    }

    fn raw_output(&self, u: &[f64]) -> HermitianMatrix {
        (self.output)(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_system_domain_and_inverse() {
        let s = CouplingSystem;
        assert!(s.in_domain(&[1.0, 2.0, 1.0]));
        assert!(!s.in_domain(&[1.0, 1.0, 1.0]));
        assert!(!s.in_domain(&[-1.0, -2.0, 0.0]));
        let a = s.output(&[55.0, 45.0, 2.0]).unwrap();
        assert_eq!(a.get(0, 1), c(0.0, 2.0));
        assert_eq!(
            s.chart_inverse(a.as_hermitian()).unwrap(),
            vec![55.0, 45.0, 2.0]
        );
        assert!(matches!(
            s.output(&[1.0, 1.0, 2.0]),
            Err(Error::DomainExit(_))
        ));
        assert!(matches!(
            s.output(&[1.0]),
            Err(Error::ParameterCount { .. })
        ));
    }

    #[test]
    fn finite_difference_fallback_matches_analytic() {
        let s = CouplingSystem;
        let u = [3.0, 2.0, -0.7];
        let exact = s.partials(&u).unwrap();
        let approx = central_difference_partials(&s, &u);
        for (e, a) in exact.iter().zip(&approx) {
            assert!(e.sub(a).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn affine_inverse_recovers_coordinates() {
        let basis = CouplingSystem.partials(&[1.0, 1.0, 0.0]).unwrap();
        let sys = AffineSystem::new(HermitianMatrix::zeros(2), basis).unwrap();
        let u = [4.0, 3.0, 1.5];
        let a = sys.output(&u).unwrap();
        let (back, residual) = chart_residual(&sys, a.as_hermitian()).unwrap();
        assert!(residual < 1e-14);
        for (x, y) in back.iter().zip(&u) {
            assert!((x - y).abs() < 1e-13);
        }

        // A real off-diagonal entry is outside the span.
        let off = HermitianMatrix::new(
            ComplexMatrix::from_row_major(2, &[c(4.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let (_, residual) = chart_residual(&sys, &off).unwrap();
        assert!(residual > 1e-2);
    }

    #[test]
    fn affine_rejects_dependent_basis() {
        let e = HermitianMatrix::identity(2);
        assert!(
            AffineSystem::new(HermitianMatrix::zeros(2), vec![e.clone(), e.scale(3.0)]).is_err()
        );
    }

    #[test]
    fn closure_system_uses_finite_differences() {
        let sys = ClosureSystem::new(
            2,
            1,
            |u: &[f64]| HermitianMatrix::from_real_diagonal(&[u[0] * u[0], 1.0]),
            |u: &[f64]| u[0] != 0.0,
        );
        let p = sys.partials(&[3.0]).unwrap();
        assert!((p[0].get(0, 0).re - 6.0).abs() < 1e-8);
        assert!(sys.chart_inverse(&HermitianMatrix::identity(2)).is_none());
    }
}
