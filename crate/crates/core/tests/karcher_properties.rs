mod common;

use common::*;
use hpd_core::exec::Execution;
use hpd_core::geometry::{distance, midpoint};
use hpd_core::karcher::{
    karcher_condition, karcher_cost, natural_mean_gradient, run_natural_mean, run_riemannian_mean,
    MeanProblem, ToeplitzChart,
};
use hpd_core::matrix::HpdMatrix;
use hpd_core::system::ParamSystem;
use proptest::prelude::*;

fn mean_instance() -> impl Strategy<Value = (usize, HpdMatrix, Vec<HpdMatrix>)> {
    (2usize..=3, 1usize..=5).prop_flat_map(|(n, count)| {
        (
            Just(n),
            toeplitz(n),
            prop::collection::vec(toeplitz(n), count),
        )
    })
}

fn example_41() -> Vec<HpdMatrix> {
    vec![
        hpd2([[(5.0, 0.0), (1.0, 2.0)], [(1.0, -2.0), (5.0, 0.0)]]),
        hpd2([[(4.0, 0.0), (1.0, -1.0)], [(1.0, 1.0), (4.0, 0.0)]]),
    ]
}

fn example_42() -> Vec<HpdMatrix> {
    vec![
        hpd2([[(3.0, 0.0), (1.5, 2.0)], [(1.5, -2.0), (3.0, 0.0)]]),
        hpd2([[(2.0, 0.0), (1.0, -1.0)], [(1.0, 1.0), (2.0, 0.0)]]),
        hpd2([[(4.0, 0.0), (1.0, 2.0)], [(1.0, -2.0), (4.0, 0.0)]]),
    ]
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn gradient_matches_finite_differences((n, point, inputs) in mean_instance()) {
        let chart = ToeplitzChart::new(n);
        let theta = chart.coordinates(point.as_hermitian());
        let grad = natural_mean_gradient(&chart, &theta, &inputs).unwrap();
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let cost = |t: &[f64]| karcher_cost(&chart.output(t).unwrap(), &inputs).unwrap();
        for (j, g) in grad.iter().enumerate() {
            let fd = fd_component(cost, &theta, j, 1e-3);
            let tol = 1e-5 * fd.abs() + 1e-9 * scale.max(1.0);
            prop_assert!((g - fd).abs() <= tol, "component {j}: {g} vs {fd}");
        }
    }

    #[test]
    fn two_matrix_mean_is_the_midpoint((a, b) in (toeplitz(2), toeplitz(2))) {
        let mid = midpoint(&a, &b).unwrap();
        let problem = MeanProblem::new(vec![a, b]).unwrap().with_eps(1e-13);
        for traj in [run_riemannian_mean(&problem).unwrap(), run_natural_mean(&problem).unwrap()] {
            let r = &traj.last().unwrap().point;
            prop_assert!(distance(r, &mid).unwrap() <= 1e-8, "{}: {:?}", traj.algorithm(), traj.termination());
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn natural_descent_is_monotone(inputs in prop::collection::vec(toeplitz(3), 2..=4)) {
        let problem = MeanProblem::new(inputs).unwrap().with_eps(1e-12);
        let traj = run_natural_mean(&problem).unwrap();
        for w in traj.costs().windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn execution_modes_agree(inputs in prop::collection::vec(toeplitz(3), 2..=6)) {
        let base = MeanProblem::new(inputs).unwrap().with_eps(1e-12);
        let seq = base.clone().with_execution(Execution::Sequential);
        let par = base.with_execution(Execution::Parallel);
        for (a, b) in [
            (run_riemannian_mean(&seq).unwrap(), run_riemannian_mean(&par).unwrap()),
            (run_natural_mean(&seq).unwrap(), run_natural_mean(&par).unwrap()),
        ] {
            prop_assert_eq!(a.costs(), b.costs());
        }
    }
}

#[test]
fn fixed_point_condition_holds_at_convergence() {
    for inputs in [example_41(), example_42()] {
        let problem = MeanProblem::new(inputs.clone()).unwrap();
        for traj in [
            run_riemannian_mean(&problem).unwrap(),
            run_natural_mean(&problem).unwrap(),
        ] {
            assert!(traj.converged(), "{}", traj.algorithm());
            let cond = karcher_condition(&traj.last().unwrap().point, &inputs).unwrap();
            assert!(cond <= 10.0 * problem.eps, "{}: {cond:e}", traj.algorithm());
        }
    }
}

#[test]
fn algorithms_agree_on_examples() {
    for inputs in [example_41(), example_42()] {
        let problem = MeanProblem::new(inputs).unwrap();
        let r = run_riemannian_mean(&problem).unwrap();
        let n = run_natural_mean(&problem).unwrap();
        let d = distance(&r.last().unwrap().point, &n.last().unwrap().point).unwrap();
        assert!(d <= 1e-6, "{d:e}");
    }
}

/// For n ≥ 3 the unconstrained mean of Toeplitz matrices need not be
/// Toeplitz; this only reports how far the two solutions are apart.
#[test]
fn algorithms_on_three_by_three_report() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let inputs = prop::collection::vec(toeplitz(3), 3)
        .new_tree(&mut runner)
        .unwrap()
        .current();
    let problem = MeanProblem::new(inputs).unwrap().with_eps(1e-12);
    let r = run_riemannian_mean(&problem).unwrap();
    let n = run_natural_mean(&problem).unwrap();
    let (rl, nl) = (r.last().unwrap(), n.last().unwrap());
    let chart = ToeplitzChart::new(3);
    println!(
        "3x3: d(riemannian, natural) = {:e}, Toeplitz residual of unconstrained mean = {:e}, costs {} vs {}",
        distance(&rl.point, &nl.point).unwrap(),
        chart.residual(rl.point.as_hermitian()),
        rl.cost,
        nl.cost
    );
    // The constrained minimum can never beat the unconstrained one.
    assert!(rl.cost <= nl.cost + 1e-12);
}
