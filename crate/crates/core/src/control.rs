//! Steering the output `A(u)` of a parametrised HPD system toward a target
//! `B` by minimising `J(u) = d²(A(u), B)`.
//!
//! Two controllers are provided:
//!
//! * the Riemannian controller moves the output along the geodesic to `B`,
//!   `A_{k+1} = exp_{A_k}(η·Log_{A_k}(B))`, and reads `u_k` back through
//!   the chart inverse. It needs `B` on the output submanifold.
//! * the natural-gradient controller updates the inputs directly,
//!   `u_{k+1} = u_k − η·G⁻¹∇J(u_k)`, with `G` the pulled-back metric. It
//!   also works when `B` is off the submanifold, where it converges to the
//!   geodesic projection of `B`.
//!
//! The descent direction of `d²(·, B)` at `A` is `+Log_A(B)` (the Riemannian
//! gradient is `−2·Log_A(B)`), so the Riemannian step walks toward `B`.

use crate::error::{Error, Result};
use crate::geometry::{distance, Frame, GeodesicSegment};
use crate::matrix::HpdMatrix;
use crate::natural::FisherMetric;
use crate::system::{chart_residual, ParamSystem};
use crate::trajectory::{Step, Termination, Trajectory};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_EPS: f64 = 1e-15;
pub const RIEMANNIAN_ETA: f64 = 0.5;
pub const NATURAL_ETA: f64 = 0.5;
/// Step-halving budget for the natural-gradient guard.
pub const MAX_HALVINGS: usize = 20;
/// Allowed cost increase before a step is halved.
pub const DESCENT_SLACK: f64 = 1e-12;
/// Largest relative chart round-trip residual for an on-manifold target.
pub const CHART_TOL: f64 = 1e-8;

/// A control task: drive `system` from `u0` toward `target`.
pub struct ControlProblem<'a> {
    pub system: &'a dyn ParamSystem,
    pub target: HpdMatrix,
    pub u0: Vec<f64>,
    pub eta: f64,
    pub eps: f64,
    pub max_iter: usize,
}

impl<'a> ControlProblem<'a> {
    /// A problem with the default tolerance and iteration cap. `eta` starts
    /// at the natural-gradient default; set it explicitly per controller.
    pub fn new(system: &'a dyn ParamSystem, target: HpdMatrix, u0: Vec<f64>) -> Result<Self> {
        if target.dim() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                found: target.dim(),
            });
        }
        system.check_params(&u0)?;
        if !system.in_domain(&u0) {
            return Err(Error::DomainExit(u0));
        }
        Ok(Self {
            system,
            target,
            u0,
            eta: NATURAL_ETA,
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self, eta_cap: Option<f64>) -> Result<()> {
        if !(self.eta > 0.0) || eta_cap.is_some_and(|cap| self.eta > cap) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {} outside {}",
                self.eta,
                if eta_cap.is_some() {
                    "(0, 1]"
                } else {
                    "(0, ∞)"
                }
            )));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be positive",
                self.eps
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `J(u) = d²(A(u), B)`.
pub fn cost_j<S: ParamSystem + ?Sized>(system: &S, u: &[f64], target: &HpdMatrix) -> Result<f64> {
    let a = system.output(u)?;
    Ok(distance(&a, target)?.powi(2))
}

/// `exp_{A}(η·Log_A(B))`, i.e. the point at parameter `η` on the geodesic
/// from `A` to `B`.
pub fn riemannian_step(a: &HpdMatrix, target: &HpdMatrix, eta: f64) -> Result<HpdMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "Riemannian learning rate {eta} outside [0, 1]"
        )));
    }
    GeodesicSegment::new(a, target)?.at(eta)
}

/// Runs the Riemannian controller. Stops when `d(A_k, B) < eps`.
pub fn run_riemannian_control(problem: &ControlProblem<'_>) -> Result<Trajectory> {
    problem.validate(Some(1.0))?;
    let system = problem.system;
    let target = &problem.target;
    match chart_residual(system, target.as_hermitian()) {
        None => return Err(Error::MissingChartInverse),
        Some((_, residual)) if !(residual <= CHART_TOL) => {
            return Err(Error::OffManifold { residual })
        }
        Some(_) => {}
    }

    let mut traj = Trajectory::new("riemannian", system.coord_labels(), "J");
    let mut a = system.output(&problem.u0)?;
    let mut coords = problem.u0.clone();
    for k in 0..=problem.max_iter {
        let d = distance(&a, target)?;
        traj.push(Step {
            k,
            coords: Some(coords.clone()),
            point: a.clone(),
            cost: d * d,
            grad_norm: 2.0 * d,
            distance: Some(d),
        });
        if d < problem.eps {
            traj.finish(Termination::ToleranceMet);
            return Ok(traj);
        }
        if k == problem.max_iter {
            break;
        }
        a = riemannian_step(&a, target, problem.eta)?;
        coords = system
            .chart_inverse(a.as_hermitian())
            .ok_or(Error::MissingChartInverse)?;
    }
    traj.finish(Termination::MaxIterations);
    Ok(traj)
}

/// `G_ij = tr(A⁻¹ ∂ᵢA A⁻¹ ∂ⱼA)` at `u`; errors when the condition number
/// exceeds [`crate::natural::MAX_CONDITION`].
pub fn fisher_metric<S: ParamSystem + ?Sized>(system: &S, u: &[f64]) -> Result<FisherMetric> {
    let a = system.output(u)?;
    let g = FisherMetric::pullback(&a, &system.partials(u)?)?;
    let condition = g.condition_number();
    if !(condition <= crate::natural::MAX_CONDITION) {
        return Err(Error::MetricSingular { condition });
    }
    Ok(g)
}

/// `∂J/∂uⁱ = 2·tr(B^{-1/2} ln(B^{-1/2} A B^{-1/2}) B^{1/2} A⁻¹ ∂ᵢA)`.
pub fn natural_gradient_j<S: ParamSystem + ?Sized>(
    system: &S,
    u: &[f64],
    target: &HpdMatrix,
) -> Result<Vec<f64>> {
    let a = system.output(u)?;
    let partials = system.partials(u)?;
    let frame = Frame::new(target);
    let log = frame.log_whitened(&a)?;
    let left = &(frame.inv_sqrt().as_complex() * log.as_complex()) * frame.sqrt().as_complex();
    let m = &left * a.inv().as_complex();
    Ok(partials
        .iter()
        .map(|p| 2.0 * (&m * p.as_complex()).trace().re)
        .collect())
}

/// `u − η·G⁻¹∇J(u)`, solved through a Cholesky factorisation of `G`.
pub fn natural_step<S: ParamSystem + ?Sized>(
    system: &S,
    u: &[f64],
    target: &HpdMatrix,
    eta: f64,
) -> Result<Vec<f64>> {
    let grad = natural_gradient_j(system, u, target)?;
    let dir = fisher_metric(system, u)?.solve(&grad)?;
    Ok(u.iter().zip(&dir).map(|(x, d)| x - eta * d).collect())
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Outcome of one guarded update.
pub(crate) enum Guarded {
    Accepted(Vec<f64>, f64),
    Rejected(Termination),
}

/// Tries `θ − η·dir`, halving `η` up to [`MAX_HALVINGS`] times until the
/// candidate is in the domain and the cost rises by at most
/// [`DESCENT_SLACK`].
pub(crate) fn guarded_update(
    theta: &[f64],
    dir: &[f64],
    eta: f64,
    cost: f64,
    in_domain: impl Fn(&[f64]) -> bool,
    cost_at: impl Fn(&[f64]) -> Result<f64>,
) -> Result<Guarded> {
    let mut step = eta;
    let mut any_in_domain = false;
    for _ in 0..=MAX_HALVINGS {
        let cand: Vec<f64> = theta.iter().zip(dir).map(|(x, d)| x - step * d).collect();
        if in_domain(&cand) {
            any_in_domain = true;
            if let Ok(c) = cost_at(&cand) {
                if c <= cost + DESCENT_SLACK {
                    return Ok(Guarded::Accepted(cand, c));
                }
            }
        }
        step *= 0.5;
    }
    Ok(Guarded::Rejected(if any_in_domain {
        Termination::Stalled
    } else {
        Termination::DomainExit
    }))
}

/// Runs the natural-gradient controller. Stops when `‖∇J(u_k)‖ < eps`.
pub fn run_natural_control(problem: &ControlProblem<'_>) -> Result<Trajectory> {
    problem.validate(None)?;
    let system = problem.system;
    let target = &problem.target;
    let mut traj = Trajectory::new("natural", system.coord_labels(), "J");
    let mut u = problem.u0.clone();
    let mut a = system.output(&u)?;
    let mut cost = distance(&a, target)?.powi(2);
    for k in 0..=problem.max_iter {
        let grad = natural_gradient_j(system, &u, target)?;
        let grad_norm = euclidean_norm(&grad);
        traj.push(Step {
            k,
            coords: Some(u.clone()),
            point: a.clone(),
            cost,
            grad_norm,
            distance: Some(cost.sqrt()),
        });
        if grad_norm < problem.eps {
            traj.finish(Termination::ToleranceMet);
            return Ok(traj);
        }
        if k == problem.max_iter {
            break;
        }
        let dir = match fisher_metric(system, &u).and_then(|g| g.solve(&grad)) {
            Ok(dir) => dir,
            Err(Error::MetricSingular { .. }) => {
                traj.finish(Termination::MetricSingular);
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        match guarded_update(
            &u,
            &dir,
            problem.eta,
            cost,
            |c| system.in_domain(c),
            |c| cost_j(system, c, target),
        )? {
            Guarded::Accepted(next, next_cost) => {
                u = next;
                cost = next_cost;
                a = system.output(&u)?;
            }
            Guarded::Rejected(reason) => {
                traj.finish(reason);
                return Ok(traj);
            }
        }
    }
    traj.finish(Termination::MaxIterations);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;
    use crate::system::{CouplingSystem, DiagonalSystem};

    fn diag(d: &[f64]) -> HpdMatrix {
        HpdMatrix::from_real_diagonal(d).unwrap()
    }

    fn example_target() -> HpdMatrix {
        HpdMatrix::from_rows(&[
            vec![C64::new(55.0, 0.0), C64::new(0.0, 2.0)],
            vec![C64::new(0.0, -2.0), C64::new(45.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn cost_examples() {
        let m2 = DiagonalSystem::new(2);
        assert!(cost_j(&m2, &[1.0, 4.0], &diag(&[1.0, 4.0])).unwrap() < 1e-28);
        let e = 1f64.exp();
        assert!((cost_j(&m2, &[1.0, 1.0], &diag(&[e, e])).unwrap() - 2.0).abs() < 1e-13);
        assert!(matches!(
            cost_j(&m2, &[-1.0, 1.0], &diag(&[e, e])),
            Err(Error::DomainExit(_))
        ));
    }

    #[test]
    fn riemannian_step_examples() {
        let b = example_target();
        let a = CouplingSystem.output(&[1.0, 2.0, 1.0]).unwrap();
        let full = riemannian_step(&a, &b, 1.0).unwrap();
        assert!((full.as_complex() - b.as_complex()).frobenius_norm() < 1e-10 * 55.0);
        let none = riemannian_step(&a, &b, 0.0).unwrap();
        assert!((none.as_complex() - a.as_complex()).frobenius_norm() < 1e-13);

        let e4 = 4f64.exp();
        let half = riemannian_step(&HpdMatrix::identity(2), &diag(&[e4, 1.0]), 0.5).unwrap();
        assert!((half.get(0, 0).re - 2f64.exp()).abs() < 1e-12);
        assert!(riemannian_step(&a, &b, 1.5).is_err());
    }

    #[test]
    fn riemannian_control_requires_on_manifold_target() {
        let m2 = DiagonalSystem::new(2);
        let off = HpdMatrix::from_rows(&[
            vec![C64::new(50.0, 0.0), C64::new(0.0, 20.0)],
            vec![C64::new(0.0, -20.0), C64::new(40.0, 0.0)],
        ])
        .unwrap();
        let p = ControlProblem::new(&m2, off, vec![1.0, 4.0])
            .unwrap()
            .with_eta(0.5);
        assert!(matches!(
            run_riemannian_control(&p),
            Err(Error::OffManifold { .. })
        ));
    }

    #[test]
    fn start_at_target_stops_immediately() {
        let sys = CouplingSystem;
        let u0 = vec![1.0, 2.0, 1.0];
        let b = sys.output(&u0).unwrap();
        // Gradient round-off at the target sits near 1e-15.
        let p = ControlProblem::new(&sys, b, u0)
            .unwrap()
            .with_eta(0.5)
            .with_eps(1e-12);
        let r = run_riemannian_control(&p).unwrap();
        assert_eq!(r.iterations(), 0);
        assert!(r.converged());
        let n = run_natural_control(&p).unwrap();
        assert_eq!(n.iterations(), 0);
        assert!(n.converged());
    }

    #[test]
    fn diagonal_gradient_closed_form() {
        let m2 = DiagonalSystem::new(2);
        let (b1, b2) = (3.0, 0.5);
        let u = [1.7, 2.2];
        let g = natural_gradient_j(&m2, &u, &diag(&[b1, b2])).unwrap();
        assert!((g[0] - 2.0 * (u[0] / b1).ln() / u[0]).abs() < 1e-13);
        assert!((g[1] - 2.0 * (u[1] / b2).ln() / u[1]).abs() < 1e-13);

        let g = fisher_metric(&m2, &u).unwrap();
        assert!((g.get(0, 0) - 1.0 / (u[0] * u[0])).abs() < 1e-14);
        assert!((g.get(1, 1) - 1.0 / (u[1] * u[1])).abs() < 1e-14);

        let eta = 0.1;
        let next = natural_step(&m2, &u, &diag(&[b1, b2]), eta).unwrap();
        for (i, b) in [b1, b2].iter().enumerate() {
            let expected = u[i] * (1.0 - 2.0 * eta * (u[i] / b).ln());
            assert!((next[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gradient_means_no_move() {
        let sys = CouplingSystem;
        let u = [2.0, 3.0, 0.5];
        let b = sys.output(&u).unwrap();
        let next = natural_step(&sys, &u, &b, 0.3).unwrap();
        for (x, y) in next.iter().zip(&u) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_learning_rates() {
        let sys = CouplingSystem;
        let p = ControlProblem::new(&sys, example_target(), vec![1.0, 2.0, 1.0])
            .unwrap()
            .with_eta(1.5);
        assert!(matches!(
            run_riemannian_control(&p),
            Err(Error::InvalidParameter(_))
        ));
        let p = p.with_eta(-0.1);
        assert!(matches!(
            run_natural_control(&p),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn problem_validation() {
        let sys = CouplingSystem;
        assert!(matches!(
            ControlProblem::new(&sys, HpdMatrix::identity(3), vec![1.0, 2.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ControlProblem::new(&sys, example_target(), vec![1.0, 1.0, 1.0]),
            Err(Error::DomainExit(_))
        ));
    }
}
