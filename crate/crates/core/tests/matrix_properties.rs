mod common;

use common::*;
use hpd_core::matrix::{hpd_fun, HermitianMatrix, MatrixFunction};
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn symmetrization_is_idempotent(g in (1usize..=6).prop_flat_map(|n| complex(n, 3.0))) {
        let once = HermitianMatrix::symmetrize(&g + &g.adjoint());
        let twice = HermitianMatrix::new(once.as_complex().clone()).unwrap();
        prop_assert_eq!(once.as_complex(), twice.as_complex());
    }

    #[test]
    fn eigendecomposition_reconstructs(h in (1usize..=8).prop_flat_map(|n| hermitian(n, 10.0))) {
        let e = h.eig().unwrap();
        let err = (e.reconstruct().as_complex() - h.as_complex()).frobenius_norm();
        prop_assert!(err <= 1e-10 * h.frobenius_norm().max(1.0), "error {err:e}");
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn power_one_is_identity_map(a in (1usize..=6).prop_flat_map(hpd)) {
        let p = hpd_fun(&a, MatrixFunction::Pow(1.0));
        prop_assert!(rel_diff(p.as_complex(), a.as_complex()) <= 1e-9);
    }

    #[test]
    fn powers_compose(
        a in (1usize..=6).prop_flat_map(hpd),
        s in -2.0f64..2.0,
        t in -2.0f64..2.0,
    ) {
        let lhs = a.pow(s).unwrap().pow(t).unwrap();
        let rhs = a.pow(s * t).unwrap();
        let err = (lhs.as_complex() - rhs.as_complex()).frobenius_norm() / rhs.frobenius_norm();
        prop_assert!(err <= 1e-9, "error {err:e}");
    }

    #[test]
    fn inverse_square_root_whitens(a in (1usize..=6).prop_flat_map(|n| hpd_with_condition(n, 6.0))) {
        let w = a.inv_sqrt();
        let prod = &(w.as_complex() * a.as_complex()) * w.as_complex();
        let err = (&prod - &hpd_core::matrix::ComplexMatrix::identity(a.dim())).frobenius_norm();
        prop_assert!(err <= 1e-10 * (a.dim() as f64).sqrt().max(1.0), "error {err:e}, cond {:e}", a.condition_number());
    }

    #[test]
    fn log_and_exp_are_inverse(a in (1usize..=6).prop_flat_map(hpd)) {
        let back = a.log().exp().unwrap();
        prop_assert!(rel_diff(back.as_complex(), a.as_complex()) <= 1e-10);
    }
}
