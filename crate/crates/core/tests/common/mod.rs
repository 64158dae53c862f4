//! Random-instance strategies shared by the property suites.
#![allow(dead_code)]

use hpd_core::matrix::{ComplexMatrix, HermitianMatrix, HpdMatrix, C64};
use proptest::prelude::*;

fn complex_entries(len: usize, scale: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-scale..scale, -scale..scale), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| C64::new(re, im)).collect())
}

pub fn complex(n: usize, scale: f64) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(n * n, scale).prop_map(move |e| ComplexMatrix::from_row_major(n, &e).unwrap())
}

pub fn hermitian(n: usize, scale: f64) -> impl Strategy<Value = HermitianMatrix> {
    complex(n, scale).prop_map(|g| HermitianMatrix::symmetrize(&g + &g.adjoint()))
}

/// `G Gᴴ + s·I`: well conditioned, entries of order one.
pub fn hpd(n: usize) -> impl Strategy<Value = HpdMatrix> {
    (complex(n, 1.0), 0.1f64..2.0).prop_map(move |(g, s)| {
        let m = &(&g * &g.adjoint()) + &ComplexMatrix::identity(n).scale(s);
        HpdMatrix::from_complex(m).unwrap()
    })
}

/// HPD with a prescribed spectral range: a random unitary conjugating
/// eigenvalues `10^x`, `x ∈ [0, log10_cond]`.
pub fn hpd_with_condition(n: usize, log10_cond: f64) -> impl Strategy<Value = HpdMatrix> {
    (
        hermitian(n, 1.0),
        prop::collection::vec(0.0..=log10_cond, n),
    )
        .prop_map(move |(h, xs)| {
            let u = h.eig().unwrap().eigenvectors;
            let d = ComplexMatrix::from_real_diagonal(
                &xs.iter().map(|x| 10f64.powf(*x)).collect::<Vec<_>>(),
            );
            HpdMatrix::from_complex(&(&u * &d) * &u.adjoint()).unwrap()
        })
}

/// Invertible by diagonal dominance.
pub fn invertible(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex(n, 1.0).prop_map(move |g| &g + &ComplexMatrix::identity(n).scale(1.5 * n as f64))
}

/// Hermitian Toeplitz, positive definite by diagonal dominance; the first
/// row is `r0, r1, …`.
pub fn toeplitz(n: usize) -> impl Strategy<Value = HpdMatrix> {
    (complex_entries(n - 1, 1.0), 0.2f64..2.0).prop_map(move |(r, slack)| {
        let r0 = slack + 2.0 * r.iter().map(|z| z.norm()).sum::<f64>();
        let entry = |i: usize, j: usize| match i.cmp(&j) {
            std::cmp::Ordering::Equal => C64::new(r0, 0.0),
            std::cmp::Ordering::Less => r[j - i - 1],
            std::cmp::Ordering::Greater => r[i - j - 1].conj(),
        };
        let flat: Vec<C64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| entry(i, j)))
            .collect();
        HpdMatrix::from_complex(ComplexMatrix::from_row_major(n, &flat).unwrap()).unwrap()
    })
}

pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(1.0)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hpd2(rows: [[(f64, f64); 2]; 2]) -> HpdMatrix {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&(a, b)| c(a, b)).collect())
        .collect();
    HpdMatrix::from_rows(&rows).unwrap()
}

/// Five-point central difference of `f` along coordinate `i`.
pub fn fd_component(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let at = |d: f64| {
        let mut y = x.to_vec();
        y[i] += d;
        f(&y)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// Fixed case count; no regression files are written next to the tests.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
