//! Iterate records shared by the controllers and the mean solvers.

use serde::Serialize;

use crate::matrix::{HermitianMatrix, HpdMatrix};

/// Why an iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    MaxIterations,
    /// Every step-size reduction left the parameter domain.
    DomainExit,
    MetricSingular,
    /// No step-size reduction decreased the cost; the iterate sits at the
    /// floating-point resolution of the cost.
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ToleranceMet => "tolerance_met",
            Self::MaxIterations => "max_iterations",
            Self::DomainExit => "domain_exit",
            Self::MetricSingular => "metric_singular",
            Self::Stalled => "stalled",
        }
    }
}

/// One iterate.
#[derive(Clone, Debug)]
pub struct Step {
    pub k: usize,
    /// Chart coordinates, when the run has a chart.
    pub coords: Option<Vec<f64>>,
    pub point: HpdMatrix,
    pub cost: f64,
    pub grad_norm: f64,
    /// Geodesic distance to the control target, for control runs.
    pub distance: Option<f64>,
}

/// Ordered iterates plus the termination reason.
#[derive(Clone, Debug)]
pub struct Trajectory {
    algorithm: String,
    coord_labels: Vec<String>,
    cost_label: String,
    steps: Vec<Step>,
    termination: Termination,
}

impl Trajectory {
    pub fn new(algorithm: &str, coord_labels: Vec<String>, cost_label: &str) -> Self {
        Self {
            algorithm: algorithm.to_owned(),
            coord_labels,
            cost_label: cost_label.to_owned(),
            steps: Vec::new(),
            termination: Termination::MaxIterations,
        }
    }

    /// Appends a step. Panics if `k` does not increase or the cost is not
    /// finite; both are bugs in the caller.
    pub fn push(&mut self, step: Step) {
        if let Some(last) = self.steps.last() {
            assert!(step.k > last.k, "step indices must increase");
        }
        assert!(step.cost.is_finite(), "non-finite cost at step {}", step.k);
        self.steps.push(step);
    }

    pub fn finish(&mut self, termination: Termination) {
        self.termination = termination;
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn coord_labels(&self) -> &[String] {
        &self.coord_labels
    }

    pub fn cost_label(&self) -> &str {
        &self.cost_label
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn last(&self) -> Option<&Step> {
        self.steps.last()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Index of the final iterate.
    pub fn iterations(&self) -> usize {
        self.steps.last().map_or(0, |s| s.k)
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::ToleranceMet
    }

    pub fn costs(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.cost).collect()
    }

    /// First `k` with `cost − floor ≤ threshold`.
    pub fn first_below(&self, floor: f64, threshold: f64) -> Option<usize> {
        self.steps
            .iter()
            .find(|s| s.cost - floor <= threshold)
            .map(|s| s.k)
    }
}

/// Real coordinates of a Hermitian matrix: the diagonal, then real and
/// imaginary parts of the strict upper triangle row by row.
pub fn hermitian_coordinates(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dim();
    let mut out: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let z = h.get(i, j);
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}

/// Column names matching [`hermitian_coordinates`].
pub fn hermitian_coordinate_labels(n: usize) -> Vec<String> {
    let mut out: Vec<String> = (0..n).map(|i| format!("re_{}{}", i + 1, i + 1)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(format!("re_{}{}", i + 1, j + 1));
            out.push(format!("im_{}{}", i + 1, j + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, C64};

    fn step(k: usize, cost: f64) -> Step {
        Step {
            k,
            coords: None,
            point: HpdMatrix::identity(1),
            cost,
            grad_norm: 0.0,
            distance: None,
        }
    }

    #[test]
    fn bookkeeping() {
        let mut t = Trajectory::new("test", vec![], "L");
        t.push(step(0, 4.0));
        t.push(step(1, 1.0));
        t.push(step(2, 0.25));
        t.finish(Termination::ToleranceMet);
        assert_eq!(t.iterations(), 2);
        assert!(t.converged());
        assert_eq!(t.first_below(0.0, 1.0), Some(1));
        assert_eq!(t.first_below(0.2, 0.01), None);
    }

    #[test]
    #[should_panic(expected = "increase")]
    fn rejects_repeated_index() {
        let mut t = Trajectory::new("test", vec![], "L");
        t.push(step(3, 1.0));
        t.push(step(3, 1.0));
    }

    #[test]
    fn coordinates_layout() {
        let h = HermitianMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![C64::new(5.0, 0.0), C64::new(1.0, 2.0)],
                vec![C64::new(1.0, -2.0), C64::new(4.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(hermitian_coordinates(&h), vec![5.0, 4.0, 1.0, 2.0]);
        assert_eq!(
            hermitian_coordinate_labels(2),
            vec!["re_11", "re_22", "re_12", "im_12"]
        );
    }
}
