//! Karcher means of HPD matrices, `argmin_R (1/N) Σᵢ d²(Rⁱ, R)`.
//!
//! The Riemannian solver iterates on the full cone,
//! `R_{k+1} = exp_{R_k}(η Σᵢ Log_{R_k}(Rⁱ))`. The natural-gradient solver
//! works in the Toeplitz chart `θ ↦ R(θ)`, preconditioning the coordinate
//! gradient with the pulled-back metric. Per-input terms are independent
//! and are evaluated through [`Execution`].

use crate::control::{
    euclidean_norm, fisher_metric, guarded_update, Guarded, DESCENT_SLACK, MAX_HALVINGS,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{distance, Frame, GeodesicSegment};
use crate::matrix::{ComplexMatrix, HermitianMatrix, HpdMatrix, C64};
use crate::system::ParamSystem;
use crate::trajectory::{
    hermitian_coordinate_labels, hermitian_coordinates, Step, Termination, Trajectory,
};

pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_EPS: f64 = 1e-15;
/// Riemannian default learning rate on the summed (not averaged) gradient.
pub const RIEMANNIAN_ETA: f64 = 0.1;
pub const NATURAL_ETA: f64 = 0.5;
/// Largest relative distance from the Toeplitz structure accepted for
/// natural-gradient inputs.
pub const TOEPLITZ_TOL: f64 = 1e-10;

/// Hermitian Toeplitz matrices parametrised by their first row:
/// `θ = (r₀, Re c₁, Im c₁, …, Re c_{n−1}, Im c_{n−1})` with `R_{0,k} = c_k`
/// and `R_{j,k} = R_{0,k−j}` above the diagonal. For `n = 2` this is
/// `[[θ₁, θ₂ + iθ₃], [θ₂ − iθ₃, θ₁]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToeplitzChart {
    n: usize,
}

impl ToeplitzChart {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be positive");
        Self { n }
    }

    /// First-row coordinates of the Toeplitz projection of `h` (each
    /// diagonal replaced by its mean).
    pub fn coordinates(&self, h: &HermitianMatrix) -> Vec<f64> {
        let n = self.n;
        let mut theta = Vec::with_capacity(2 * n - 1);
        theta.push((0..n).map(|i| h.get(i, i).re).sum::<f64>() / n as f64);
        for k in 1..n {
            let mean = (0..n - k).map(|j| h.get(j, j + k)).sum::<C64>() / (n - k) as f64;
            theta.push(mean.re);
            theta.push(mean.im);
        }
        theta
    }

    /// `‖h − R(θ(h))‖_F / max(1, ‖h‖_F)`.
    pub fn residual(&self, h: &HermitianMatrix) -> f64 {
        let back = self.raw_output(&self.coordinates(h));
        back.sub(h).frobenius_norm() / h.frobenius_norm().max(1.0)
    }

    fn first_row(&self, theta: &[f64]) -> Vec<C64> {
        let mut row = vec![C64::new(theta[0], 0.0)];
        row.extend((1..self.n).map(|k| C64::new(theta[2 * k - 1], theta[2 * k])));
        row
    }
}

impl ParamSystem for ToeplitzChart {
    fn dim(&self) -> usize {
        self.n
    }

    fn n_params(&self) -> usize {
        2 * self.n - 1
    }

    fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == self.n_params()
            && theta.iter().all(|x| x.is_finite())
            && HpdMatrix::new(self.raw_output(theta)).is_ok()
    }

    fn raw_output(&self, theta: &[f64]) -> HermitianMatrix {
        let row = self.first_row(theta);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                entries.push(if k >= j {
                    row[k - j]
                } else {
                    row[j - k].conj()
                });
            }
        }
        HermitianMatrix::symmetrize(ComplexMatrix::from_row_major(n, &entries).expect("square"))
    }

    fn partials(&self, theta: &[f64]) -> Result<Vec<HermitianMatrix>> {
        self.check_params(theta)?;
        Ok((0..self.n_params())
            .map(|i| {
                let mut e = vec![0.0; self.n_params()];
                e[i] = 1.0;
                self.raw_output(&e)
            })
            .collect())
    }

    fn chart_inverse(&self, a: &HermitianMatrix) -> Option<Vec<f64>> {
        (a.dim() == self.n).then(|| self.coordinates(a))
    }

    fn coord_labels(&self) -> Vec<String> {
        (1..=self.n_params())
            .map(|i| format!("theta_{i}"))
            .collect()
    }
}

/// Inputs and iteration settings for a Karcher-mean computation.
#[derive(Clone, Debug)]
pub struct MeanProblem {
    pub inputs: Vec<HpdMatrix>,
    /// `None` selects the per-algorithm default.
    pub eta: Option<f64>,
    pub eps: f64,
    pub max_iter: usize,
    pub execution: Execution,
}

impl MeanProblem {
    pub fn new(inputs: Vec<HpdMatrix>) -> Result<Self> {
        let first = inputs.first().ok_or(Error::EmptyInput)?;
        for m in &inputs[1..] {
            first.check_dim(m)?;
        }
        Ok(Self {
            inputs,
            eta: None,
            eps: DEFAULT_EPS,
            max_iter: DEFAULT_MAX_ITER,
            execution: Execution::default(),
        })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
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

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].dim()
    }

    /// `1/N`, the step that turns the summed gradient into the mean of the
    /// log maps.
    pub fn mean_scaled_eta(&self) -> f64 {
        1.0 / self.inputs.len() as f64
    }

    /// `(1/N) Σᵢ Rⁱ`.
    pub fn arithmetic_mean(&self) -> Result<HpdMatrix> {
        let n = self.inputs.len() as f64;
        let sum = self.inputs[1..]
            .iter()
            .fold(self.inputs[0].as_hermitian().clone(), |acc, m| {
                acc.add(m.as_hermitian())
            });
        HpdMatrix::new(sum.scale(1.0 / n))
    }

    fn settings(&self, default_eta: f64) -> Result<f64> {
        let eta = self.eta.unwrap_or(default_eta);
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning rate {eta} must be positive"
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
        Ok(eta)
    }
}

/// `L(R) = (1/N) Σᵢ d²(Rⁱ, R)`.
pub fn karcher_cost(r: &HpdMatrix, inputs: &[HpdMatrix]) -> Result<f64> {
    karcher_cost_with(r, inputs, Execution::Sequential)
}

pub fn karcher_cost_with(r: &HpdMatrix, inputs: &[HpdMatrix], exec: Execution) -> Result<f64> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let terms = exec.try_map(inputs, |m| distance(m, r).map(|d| d * d))?;
    Ok(terms.iter().sum::<f64>() / inputs.len() as f64)
}

/// `Σᵢ ln(R^{-1/2} Rⁱ R^{-1/2})`, the summed log maps in whitened
/// coordinates at `frame`'s base. Its Frobenius norm is the metric norm of
/// `Σᵢ Log_R(Rⁱ)`; it vanishes exactly at the Karcher mean.
pub fn whitened_log_sum(
    frame: &Frame,
    inputs: &[HpdMatrix],
    exec: Execution,
) -> Result<HermitianMatrix> {
    let terms = exec.try_map(inputs, |m| frame.log_whitened(m))?;
    Ok(sum_hermitian(terms, frame.base().dim()))
}

fn sum_hermitian(terms: Vec<HermitianMatrix>, n: usize) -> HermitianMatrix {
    terms
        .into_iter()
        .fold(HermitianMatrix::zeros(n), |acc, t| acc.add(&t))
}

/// Metric norm at `r` of `Σᵢ Log_R(Rⁱ)`.
pub fn karcher_condition(r: &HpdMatrix, inputs: &[HpdMatrix]) -> Result<f64> {
    Ok(whitened_log_sum(&Frame::new(r), inputs, Execution::Sequential)?.frobenius_norm())
}

/// `exp_R(η Σᵢ Log_R(Rⁱ))`.
pub fn riemannian_mean_step(r: &HpdMatrix, inputs: &[HpdMatrix], eta: f64) -> Result<HpdMatrix> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let frame = Frame::new(r);
    let sum = whitened_log_sum(&frame, inputs, Execution::Sequential)?;
    step_from_whitened(&frame, &sum, eta)
}

fn step_from_whitened(frame: &Frame, sum: &HermitianMatrix, eta: f64) -> Result<HpdMatrix> {
    let inner = sum.scale(eta).exp()?;
    HpdMatrix::new(frame.color(inner.as_hermitian()))
}

/// Runs the Riemannian iteration from the arithmetic mean. Stops when the
/// metric norm of `Σᵢ Log_{R_k}(Rⁱ)` drops below `eps`; a step that raises
/// `L` is halved.
pub fn run_riemannian_mean(problem: &MeanProblem) -> Result<Trajectory> {
    let eta = problem.settings(RIEMANNIAN_ETA)?;
    let exec = problem.execution;
    let inputs = &problem.inputs;
    let mut traj = Trajectory::new(
        "riemannian",
        hermitian_coordinate_labels(problem.dim()),
        "L",
    );
    let mut r = problem.arithmetic_mean()?;
    let mut cost = karcher_cost_with(&r, inputs, exec)?;
    for k in 0..=problem.max_iter {
        let frame = Frame::new(&r);
        let sum = whitened_log_sum(&frame, inputs, exec)?;
        let grad_norm = sum.frobenius_norm();
        traj.push(Step {
            k,
            coords: Some(hermitian_coordinates(r.as_hermitian())),
            point: r.clone(),
            cost,
            grad_norm,
            distance: None,
        });
        if grad_norm < problem.eps {
            traj.finish(Termination::ToleranceMet);
            return Ok(traj);
        }
        if k == problem.max_iter {
            break;
        }
        let mut step = eta;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            if let Ok(cand) = step_from_whitened(&frame, &sum, step) {
                let c = karcher_cost_with(&cand, inputs, exec)?;
                if c <= cost + DESCENT_SLACK {
                    accepted = Some((cand, c));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((next, c)) => {
                r = next;
                cost = c;
            }
            None => {
                traj.finish(Termination::Stalled);
                return Ok(traj);
            }
        }
    }
    traj.finish(Termination::MaxIterations);
    Ok(traj)
}

/// Per-input square roots, computed once per solve.
struct PreparedInputs {
    frames: Vec<Frame>,
}

impl PreparedInputs {
    fn new(inputs: &[HpdMatrix], exec: Execution) -> Self {
        Self {
            frames: exec.map(inputs, Frame::new),
        }
    }

    /// `∂L/∂θʲ = (2/N) tr(Σᵢ Rᵢ^{-1/2} ln(Rᵢ^{-1/2} R Rᵢ^{-1/2}) Rᵢ^{1/2} R⁻¹ ∂ⱼR)`.
    fn gradient(
        &self,
        r: &HpdMatrix,
        partials: &[HermitianMatrix],
        exec: Execution,
    ) -> Result<Vec<f64>> {
        let n = r.dim();
        let terms = exec.try_map(&self.frames, |f| -> Result<ComplexMatrix> {
            let log = f.log_whitened(r)?;
            Ok(&(f.inv_sqrt().as_complex() * log.as_complex()) * f.sqrt().as_complex())
        })?;
        let sum = terms
            .iter()
            .fold(ComplexMatrix::zeros(n), |acc, t| &acc + t);
        let m = &sum * r.inv().as_complex();
        let scale = 2.0 / self.frames.len() as f64;
        Ok(partials
            .iter()
            .map(|p| scale * (&m * p.as_complex()).trace().re)
            .collect())
    }
}

/// Coordinate gradient of `θ ↦ L(R(θ))`.
pub fn natural_mean_gradient(
    chart: &ToeplitzChart,
    theta: &[f64],
    inputs: &[HpdMatrix],
) -> Result<Vec<f64>> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let r = chart.output(theta)?;
    let prepared = PreparedInputs::new(inputs, Execution::Sequential);
    prepared.gradient(&r, &chart.partials(theta)?, Execution::Sequential)
}

/// Runs the natural-gradient iteration in the Toeplitz chart, starting at
/// the coordinates of the arithmetic mean. Stops when `‖∇L(θ_k)‖ < eps`.
pub fn run_natural_mean(problem: &MeanProblem) -> Result<Trajectory> {
    let eta = problem.settings(NATURAL_ETA)?;
    let exec = problem.execution;
    let inputs = &problem.inputs;
    let chart = ToeplitzChart::new(problem.dim());
    for (index, m) in inputs.iter().enumerate() {
        let residual = chart.residual(m.as_hermitian());
        if !(residual <= TOEPLITZ_TOL) {
            return Err(Error::NotToeplitz { index, residual });
        }
    }
    let prepared = PreparedInputs::new(inputs, exec);
    let partials = chart.partials(&vec![0.0; chart.n_params()])?;
    let cost_at =
        |theta: &[f64]| -> Result<f64> { karcher_cost_with(&chart.output(theta)?, inputs, exec) };

    let mut traj = Trajectory::new("natural", chart.coord_labels(), "L");
    let mut theta = chart.coordinates(problem.arithmetic_mean()?.as_hermitian());
    let mut r = chart.output(&theta)?;
    let mut cost = karcher_cost_with(&r, inputs, exec)?;
    for k in 0..=problem.max_iter {
        let grad = prepared.gradient(&r, &partials, exec)?;
        let grad_norm = euclidean_norm(&grad);
        traj.push(Step {
            k,
            coords: Some(theta.clone()),
            point: r.clone(),
            cost,
            grad_norm,
            distance: None,
        });
        if grad_norm < problem.eps {
            traj.finish(Termination::ToleranceMet);
            return Ok(traj);
        }
        if k == problem.max_iter {
            break;
        }
        let dir = match fisher_metric(&chart, &theta).and_then(|g| g.solve(&grad)) {
            Ok(dir) => dir,
            Err(Error::MetricSingular { .. }) => {
                traj.finish(Termination::MetricSingular);
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        match guarded_update(&theta, &dir, eta, cost, |t| chart.in_domain(t), cost_at)? {
            Guarded::Accepted(next, c) => {
                theta = next;
                cost = c;
                r = chart.output(&theta)?;
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

/// Closest approach between two medians, at parameters `s` and `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MedianGap {
    pub first: usize,
    pub second: usize,
    pub distance: f64,
    pub s: f64,
    pub t: f64,
}

/// Sampled sides and medians of a geodesic triangle.
#[derive(Clone, Debug)]
pub struct GeodesicTriangle {
    pub vertices: [HpdMatrix; 3],
    /// `sides[i]` joins the two vertices other than `i`.
    pub sides: Vec<Vec<HpdMatrix>>,
    /// `medians[i]` runs from vertex `i` to the midpoint of `sides[i]`.
    pub medians: Vec<Vec<HpdMatrix>>,
    pub gaps: Vec<MedianGap>,
}

const OTHERS: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

/// Builds the triangle with vertices `r1, r2, r3`, samples each side and
/// median at `samples` points, and measures how close each pair of medians
/// comes. In flat geometry the medians meet; on the HPD cone they need not.
pub fn geodesic_triangle(
    r1: &HpdMatrix,
    r2: &HpdMatrix,
    r3: &HpdMatrix,
    samples: usize,
    exec: Execution,
) -> Result<GeodesicTriangle> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 samples per curve".into(),
        ));
    }
    let vertices = [r1.clone(), r2.clone(), r3.clone()];
    r1.check_dim(r2)?;
    r1.check_dim(r3)?;
    for (i, &(a, b)) in OTHERS.iter().enumerate() {
        let d = distance(&vertices[a], &vertices[b])?;
        if d <= 1e-12 {
            return Err(Error::Degenerate(format!(
                "vertices {} and {} coincide (side {i} has zero length)",
                a + 1,
                b + 1
            )));
        }
    }
    let sides: Vec<GeodesicSegment> = OTHERS
        .iter()
        .map(|&(a, b)| GeodesicSegment::new(&vertices[a], &vertices[b]))
        .collect::<Result<_>>()?;
    let medians: Vec<GeodesicSegment> = (0..3)
        .map(|i| GeodesicSegment::new(&vertices[i], &sides[i].at(0.5)?))
        .collect::<Result<_>>()?;

    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let gaps = exec.try_map(&pairs, |&(i, j)| {
        closest_approach(&medians[i], &medians[j], samples, i, j)
    })?;

    Ok(GeodesicTriangle {
        sides: sides
            .iter()
            .map(|s| s.sample(samples))
            .collect::<Result<_>>()?,
        medians: medians
            .iter()
            .map(|m| m.sample(samples))
            .collect::<Result<_>>()?,
        vertices,
        gaps,
    })
}

/// Residual vector whose Euclidean norm is `d(P, Q)`: the real coordinates
/// of `ln(P^{-1/2} Q P^{-1/2})`, off-diagonal parts weighted by √2.
fn log_residual(p: &HpdMatrix, q: &HpdMatrix) -> Result<Vec<f64>> {
    let log = Frame::new(p).log_whitened(q)?;
    let n = log.dim();
    let mut v = hermitian_coordinates(&log);
    for x in v.iter_mut().skip(n) {
        *x *= std::f64::consts::SQRT_2;
    }
    Ok(v)
}

/// Minimises `d(γ(s), δ(t))` over `[0,1]²`: a grid scan then projected
/// Gauss–Newton on the log residual.
fn closest_approach(
    gamma: &GeodesicSegment,
    delta: &GeodesicSegment,
    samples: usize,
    first: usize,
    second: usize,
) -> Result<MedianGap> {
    let grid = samples.max(3);
    let at = |i: usize| i as f64 / (grid - 1) as f64;
    let g: Vec<HpdMatrix> = (0..grid).map(|i| gamma.at(at(i))).collect::<Result<_>>()?;
    let d: Vec<HpdMatrix> = (0..grid).map(|i| delta.at(at(i))).collect::<Result<_>>()?;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (i, p) in g.iter().enumerate() {
        for (j, q) in d.iter().enumerate() {
            let dist = distance(p, q)?;
            if dist < best.0 {
                best = (dist, at(i), at(j));
            }
        }
    }

    let residual =
        |s: f64, t: f64| -> Result<Vec<f64>> { log_residual(&gamma.at(s)?, &delta.at(t)?) };
    let (mut s, mut t) = (best.1, best.2);
    let mut r = residual(s, t)?;
    let mut f = euclidean_norm(&r);
    const H: f64 = 1e-6;
    for _ in 0..100 {
        if f == 0.0 {
            break;
        }
        let col = |ds: f64, dt: f64| -> Result<Vec<f64>> {
            let plus = residual(s + ds, t + dt)?;
            let minus = residual(s - ds, t - dt)?;
            Ok(plus
                .iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * H))
                .collect())
        };
        let js = col(H, 0.0)?;
        let jt = col(0.0, H)?;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let (a11, a12, a22) = (dot(&js, &js), dot(&js, &jt), dot(&jt, &jt));
        let (b1, b2) = (-dot(&js, &r), -dot(&jt, &r));
        let damp = 1e-14 * (a11 + a22);
        let det = (a11 + damp) * (a22 + damp) - a12 * a12;
        if det <= 0.0 {
            break;
        }
        let ds = ((a22 + damp) * b1 - a12 * b2) / det;
        let dt = ((a11 + damp) * b2 - a12 * b1) / det;
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda > 1e-8 {
            let (ns, nt) = (
                (s + lambda * ds).clamp(0.0, 1.0),
                (t + lambda * dt).clamp(0.0, 1.0),
            );
            let nr = residual(ns, nt)?;
            let nf = euclidean_norm(&nr);
            if nf < f {
                improved = (f - nf) > 1e-16 * f.max(1e-300) || nf < 1e-14;
                s = ns;
                t = nt;
                r = nr;
                f = nf;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(MedianGap {
        first,
        second,
        distance: f.min(best.0),
        s,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toeplitz2(a: f64, re: f64, im: f64) -> HpdMatrix {
        ToeplitzChart::new(2).output(&[a, re, im]).unwrap()
    }

    #[test]
    fn chart_layout_matches_first_row() {
        let r = toeplitz2(5.0, 1.0, 2.0);
        assert_eq!(r.get(0, 1), C64::new(1.0, 2.0));
        assert_eq!(r.get(1, 0), C64::new(1.0, -2.0));
        let chart = ToeplitzChart::new(3);
        let h = chart.raw_output(&[4.0, 1.0, 0.5, 0.2, -0.3]);
        assert_eq!(h.get(1, 2), C64::new(1.0, 0.5));
        assert_eq!(h.get(0, 2), C64::new(0.2, -0.3));
        assert_eq!(h.get(2, 0), C64::new(0.2, 0.3));
        assert_eq!(chart.coordinates(&h), vec![4.0, 1.0, 0.5, 0.2, -0.3]);
        assert!(chart.residual(&h) < 1e-15);
        assert!(chart.residual(&HermitianMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])) > 0.1);
    }

    #[test]
    fn chart_domain_two_by_two() {
        let chart = ToeplitzChart::new(2);
        assert!(chart.in_domain(&[2.0, 1.0, 1.0]));
        assert!(!chart.in_domain(&[1.0, 1.0, 1.0]));
        assert!(!chart.in_domain(&[-1.0, 0.0, 0.0]));
    }

    #[test]
    fn cost_examples() {
        let a = toeplitz2(5.0, 1.0, 2.0);
        assert!(karcher_cost(&a, std::slice::from_ref(&a)).unwrap() < 1e-28);
        assert!(karcher_cost(&a, &[a.clone(), a.clone()]).unwrap() < 1e-28);
        let e2 = HpdMatrix::from_real_diagonal(&[2f64.exp(), 1.0]).unwrap();
        let l = karcher_cost(&HpdMatrix::identity(2), &[HpdMatrix::identity(2), e2]).unwrap();
        assert!((l - 2.0).abs() < 1e-13);
        assert!(matches!(karcher_cost(&a, &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn single_input_full_step() {
        let b = toeplitz2(3.0, 1.5, 2.0);
        let r =
            riemannian_mean_step(&HpdMatrix::identity(2), std::slice::from_ref(&b), 1.0).unwrap();
        assert!((r.as_complex() - b.as_complex()).frobenius_norm() < 1e-12);
        let again = riemannian_mean_step(&b, std::slice::from_ref(&b), 0.7).unwrap();
        assert!((again.as_complex() - b.as_complex()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn single_input_runs() {
        let b = toeplitz2(3.0, 1.5, 2.0);
        let p = MeanProblem::new(vec![b.clone()]).unwrap().with_eps(1e-12);
        let n = run_natural_mean(&p).unwrap();
        assert_eq!(n.iterations(), 0);
        let r = run_riemannian_mean(&p.clone().with_eta(1.0)).unwrap();
        assert!(r.iterations() <= 1);
    }

    #[test]
    fn diagonal_like_gradient() {
        // With r₁ = 0 everywhere the problem decouples into scalar
        // geometric means: ∂L/∂θ₁ = (2/N) Σᵢ ln(θ₁/r₀ⁱ)/θ₁ per eigenvalue.
        let r0 = [2.0f64, 5.0];
        let scalar = |theta: f64| {
            2.0 / r0.len() as f64 * r0.iter().map(|r| (theta / r).ln() / theta).sum::<f64>()
        };

        let chart1 = ToeplitzChart::new(1);
        let inputs: Vec<_> = r0.iter().map(|&r| chart1.output(&[r]).unwrap()).collect();
        let g = natural_mean_gradient(&chart1, &[3.0], &inputs).unwrap();
        assert!((g[0] - scalar(3.0)).abs() < 1e-14);

        // Two equal eigenvalues contribute twice.
        let inputs: Vec<_> = r0.iter().map(|&r| toeplitz2(r, 0.0, 0.0)).collect();
        let g = natural_mean_gradient(&ToeplitzChart::new(2), &[3.0, 0.0, 0.0], &inputs).unwrap();
        assert!((g[0] - 2.0 * scalar(3.0)).abs() < 1e-13);
        assert!(g[1].abs() < 1e-14 && g[2].abs() < 1e-14);
    }

    #[test]
    fn non_toeplitz_input_rejected() {
        let bad = HpdMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let p = MeanProblem::new(vec![toeplitz2(3.0, 0.0, 0.0), bad]).unwrap();
        assert!(matches!(
            run_natural_mean(&p),
            Err(Error::NotToeplitz { index: 1, .. })
        ));
        assert!(matches!(MeanProblem::new(vec![]), Err(Error::EmptyInput)));
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let a = toeplitz2(3.0, 1.0, 0.0);
        let b = toeplitz2(2.0, 0.0, 1.0);
        assert!(matches!(
            geodesic_triangle(&a, &a, &b, 5, Execution::Sequential),
            Err(Error::Degenerate(_))
        ));
    }
}
