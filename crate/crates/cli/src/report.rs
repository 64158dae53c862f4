//! Run summaries written next to trajectories and printed on stdout.

use std::time::Duration;

use hpd_core::trajectory::{Termination, Trajectory};
use serde::Serialize;
use serde_json::Value;

use crate::error::termination_exit_code;
use crate::format::{fmt_sig, round_sig};
use crate::io::MatrixFile;

/// Cost gap (above the best final cost of the compared runs) that counts as
/// "reached" when comparing iteration counts.
pub const COMPARISON_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub final_cost: f64,
    pub final_grad_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_distance: Option<f64>,
    pub coord_labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_coords: Option<Vec<f64>>,
    pub final_matrix: MatrixFile,
    /// Kept out of the serialised report so output files are reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    /// Summarises a finished run. Panics on an empty trajectory; every
    /// solver records the starting point.
    pub fn new(traj: &Trajectory, wall_time: Duration) -> Self {
        let last = traj.last().expect("trajectory records at least the start");
        Self {
            algorithm: traj.algorithm().to_owned(),
            converged: traj.converged(),
            termination: traj.termination(),
            iterations: traj.iterations(),
            final_cost: last.cost,
            final_grad_norm: last.grad_norm,
            final_distance: last.distance,
            coord_labels: traj.coord_labels().to_vec(),
            final_coords: last.coords.clone(),
            final_matrix: MatrixFile::from_matrix(last.point.as_complex()),
            wall_time,
        }
    }

    pub fn exit_code(&self) -> i32 {
        termination_exit_code(self.termination)
    }

    /// `key: value` lines for the terminal.
    pub fn summary(&self) -> String {
        let mut lines = vec![
            format!("algorithm: {}", self.algorithm),
            format!("termination: {}", self.termination.as_str()),
            format!("converged: {}", self.converged),
            format!("iterations: {}", self.iterations),
            format!("final_cost: {}", fmt_sig(self.final_cost)),
            format!("final_grad_norm: {}", fmt_sig(self.final_grad_norm)),
        ];
        if let Some(d) = self.final_distance {
            lines.push(format!("final_distance: {}", fmt_sig(d)));
        }
        if let Some(c) = &self.final_coords {
            for (label, x) in self.coord_labels.iter().zip(c) {
                lines.push(format!("final_{label}: {}", fmt_sig(*x)));
            }
        }
        lines.push(format!("final_matrix: {}", self.final_matrix.to_json()));
        lines.join("\n")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationCount {
    pub algorithm: String,
    pub iterations: usize,
    /// First iteration whose cost is within the threshold of the reference.
    pub iterations_to_threshold: Option<usize>,
}

/// Iteration counts of several runs on the same problem.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub threshold: f64,
    /// Lowest final cost over the runs.
    pub reference_cost: f64,
    pub counts: Vec<IterationCount>,
}

impl Comparison {
    pub fn new(runs: &[&Trajectory]) -> Self {
        let reference_cost = runs
            .iter()
            .filter_map(|t| t.last().map(|s| s.cost))
            .fold(f64::INFINITY, f64::min);
        let counts = runs
            .iter()
            .map(|t| IterationCount {
                algorithm: t.algorithm().to_owned(),
                iterations: t.iterations(),
                iterations_to_threshold: t.first_below(reference_cost, COMPARISON_THRESHOLD),
            })
            .collect();
        Self {
            threshold: COMPARISON_THRESHOLD,
            reference_cost,
            counts,
        }
    }

    pub fn to_threshold(&self, algorithm: &str) -> Option<usize> {
        self.counts
            .iter()
            .find(|c| c.algorithm == algorithm)
            .and_then(|c| c.iterations_to_threshold)
    }

    /// Whether the natural-gradient run reached the threshold no later than
    /// the Riemannian one.
    pub fn natural_not_slower(&self) -> bool {
        match (
            self.to_threshold("natural"),
            self.to_threshold("riemannian"),
        ) {
            (Some(n), Some(r)) => n <= r,
            (Some(_), None) => true,
            _ => false,
        }
    }

    pub fn summary(&self) -> String {
        let mut lines = vec![format!(
            "iterations to cost within {} of {}:",
            fmt_sig(self.threshold),
            fmt_sig(self.reference_cost)
        )];
        for c in &self.counts {
            let reached = c
                .iterations_to_threshold
                .map_or("never".to_owned(), |k| k.to_string());
            lines.push(format!(
                "  {}: {} (of {})",
                c.algorithm, reached, c.iterations
            ));
        }
        lines.join("\n")
    }
}

/// Report for a preset or ad-hoc run: one entry per algorithm.
#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub name: String,
    pub runs: Vec<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

impl DemoReport {
    pub fn run(&self, algorithm: &str) -> Option<&RunReport> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }

    pub fn to_json(&self) -> String {
        to_rounded_json(self)
    }

    pub fn summary(&self) -> String {
        let mut parts = vec![format!("demo: {}", self.name)];
        parts.extend(self.runs.iter().map(RunReport::summary));
        if let Some(c) = &self.comparison {
            parts.push(c.summary());
        }
        parts.join("\n\n")
    }
}

/// Pretty JSON with every floating-point value rounded to the printed
/// precision.
pub fn to_rounded_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialise");
    round_numbers(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialise");
    s.push('\n');
    s
}

fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}
