//! Built-in presets for the four worked examples, and the shared run
//! drivers used by the `control`, `karcher` and `demo` subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::ValueEnum;
use hpd_core::control::{self, run_natural_control, run_riemannian_control, ControlProblem};
use hpd_core::exec::Execution;
use hpd_core::karcher::{self, run_natural_mean, run_riemannian_mean, MeanProblem};
use hpd_core::matrix::{HpdMatrix, C64};
use hpd_core::system::{CouplingSystem, DiagonalSystem, ParamSystem};
use hpd_core::trajectory::Trajectory;

use crate::error::{combined_exit_code, CliError};
use crate::export::{write_comparison, write_trajectory};
use crate::io::write_text;
use crate::report::{Comparison, DemoReport, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Riemannian,
    Natural,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Riemannian => "riemannian",
            Self::Natural => "natural",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Coupled three-input system steered to a reachable target.
    #[value(name = "example-3.1")]
    Example31,
    /// Diagonal system with an unreachable target (geodesic projection).
    #[value(name = "example-3.2")]
    Example32,
    /// Mean of two Toeplitz matrices (the geodesic midpoint).
    #[value(name = "example-4.1")]
    Example41,
    /// Mean of three Toeplitz matrices.
    #[value(name = "example-4.2")]
    Example42,
}

impl Demo {
    pub const ALL: [Demo; 4] = [
        Self::Example31,
        Self::Example32,
        Self::Example41,
        Self::Example42,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Example31 => "example-3.1",
            Self::Example32 => "example-3.2",
            Self::Example41 => "example-4.1",
            Self::Example42 => "example-4.2",
        }
    }
}

/// Overrides for η, ε and the iteration cap; `None` keeps each solver's
/// default.
#[derive(Clone, Copy, Debug, Default)]
pub struct Settings {
    pub eta: Option<f64>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub execution: Execution,
}

fn hpd2(rows: [[(f64, f64); 2]; 2]) -> HpdMatrix {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&(re, im)| C64::new(re, im)).collect())
        .collect();
    HpdMatrix::from_rows(&rows).expect("preset matrices are HPD")
}

pub struct ControlPreset {
    pub system: Box<dyn ParamSystem>,
    pub target: HpdMatrix,
    pub u0: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

pub fn control_preset(demo: Demo) -> Option<ControlPreset> {
    match demo {
        Demo::Example31 => Some(ControlPreset {
            system: Box::new(CouplingSystem),
            target: hpd2([[(55.0, 0.0), (0.0, 2.0)], [(0.0, -2.0), (45.0, 0.0)]]),
            u0: vec![1.0, 2.0, 1.0],
            algorithms: vec![Algorithm::Riemannian, Algorithm::Natural],
        }),
        // The target is off the diagonal family, so only the natural
        // controller applies.
        Demo::Example32 => Some(ControlPreset {
            system: Box::new(DiagonalSystem::new(2)),
            target: hpd2([[(50.0, 0.0), (0.0, 20.0)], [(0.0, -20.0), (40.0, 0.0)]]),
            u0: vec![1.0, 4.0],
            algorithms: vec![Algorithm::Natural],
        }),
        _ => None,
    }
}

pub fn mean_preset(demo: Demo) -> Option<Vec<HpdMatrix>> {
    match demo {
        Demo::Example41 => Some(vec![
            hpd2([[(5.0, 0.0), (1.0, 2.0)], [(1.0, -2.0), (5.0, 0.0)]]),
            hpd2([[(4.0, 0.0), (1.0, -1.0)], [(1.0, 1.0), (4.0, 0.0)]]),
        ]),
        Demo::Example42 => Some(vec![
            hpd2([[(3.0, 0.0), (1.5, 2.0)], [(1.5, -2.0), (3.0, 0.0)]]),
            hpd2([[(2.0, 0.0), (1.0, -1.0)], [(1.0, 1.0), (2.0, 0.0)]]),
            hpd2([[(4.0, 0.0), (1.0, 2.0)], [(1.0, -2.0), (4.0, 0.0)]]),
        ]),
        _ => None,
    }
}

pub fn run_control(
    algorithm: Algorithm,
    system: &dyn ParamSystem,
    target: &HpdMatrix,
    u0: &[f64],
    settings: &Settings,
) -> Result<(Trajectory, Duration), CliError> {
    let default_eta = match algorithm {
        Algorithm::Riemannian => control::RIEMANNIAN_ETA,
        Algorithm::Natural => control::NATURAL_ETA,
    };
    let problem = ControlProblem::new(system, target.clone(), u0.to_vec())?
        .with_eta(settings.eta.unwrap_or(default_eta))
        .with_eps(settings.eps.unwrap_or(control::DEFAULT_EPS))
        .with_max_iter(settings.max_iter.unwrap_or(control::DEFAULT_MAX_ITER));
    let start = Instant::now();
    let traj = match algorithm {
        Algorithm::Riemannian => run_riemannian_control(&problem)?,
        Algorithm::Natural => run_natural_control(&problem)?,
    };
    Ok((traj, start.elapsed()))
}

pub fn run_mean(
    algorithm: Algorithm,
    inputs: &[HpdMatrix],
    settings: &Settings,
) -> Result<(Trajectory, Duration), CliError> {
    let mut problem = MeanProblem::new(inputs.to_vec())?
        .with_eps(settings.eps.unwrap_or(karcher::DEFAULT_EPS))
        .with_max_iter(settings.max_iter.unwrap_or(karcher::DEFAULT_MAX_ITER))
        .with_execution(settings.execution);
    if let Some(eta) = settings.eta {
        problem = problem.with_eta(eta);
    }
    let start = Instant::now();
    let traj = match algorithm {
        Algorithm::Riemannian => run_riemannian_mean(&problem)?,
        Algorithm::Natural => run_natural_mean(&problem)?,
    };
    Ok((traj, start.elapsed()))
}

/// Trajectories of a finished preset, in algorithm order, plus the report.
pub struct DemoOutcome {
    pub report: DemoReport,
    pub trajectories: Vec<Trajectory>,
}

impl DemoOutcome {
    pub fn from_runs(name: &str, runs: Vec<(Trajectory, Duration)>) -> Self {
        let reports = runs
            .iter()
            .map(|(t, time)| RunReport::new(t, *time))
            .collect();
        let trajectories: Vec<Trajectory> = runs.into_iter().map(|(t, _)| t).collect();
        let comparison = (trajectories.len() > 1)
            .then(|| Comparison::new(&trajectories.iter().collect::<Vec<_>>()));
        Self {
            report: DemoReport {
                name: name.to_owned(),
                runs: reports,
                comparison,
            },
            trajectories,
        }
    }

    pub fn trajectory(&self, algorithm: Algorithm) -> Option<&Trajectory> {
        self.trajectories
            .iter()
            .find(|t| t.algorithm() == algorithm.as_str())
    }

    pub fn exit_code(&self) -> i32 {
        combined_exit_code(self.report.runs.iter().map(RunReport::exit_code))
    }

    /// Writes `<name>-<algorithm>.csv` per run, `<name>-comparison.csv` when
    /// there are several runs, and `<name>-report.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let name = &self.report.name;
        let mut written = Vec::new();
        for t in &self.trajectories {
            let path = dir.join(format!("{name}-{}.csv", t.algorithm()));
            write_csv_file(&path, |f| write_trajectory(f, t))?;
            written.push(path);
        }
        if self.trajectories.len() > 1 {
            let path = dir.join(format!("{name}-comparison.csv"));
            let runs: Vec<&Trajectory> = self.trajectories.iter().collect();
            write_csv_file(&path, |f| write_comparison(f, &runs))?;
            written.push(path);
        }
        let path = dir.join(format!("{name}-report.json"));
        write_text(&path, &self.report.to_json())?;
        written.push(path);
        Ok(written)
    }
}

pub fn write_csv_file(
    path: &Path,
    write: impl FnOnce(&mut fs::File) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write(&mut file)
}

/// Runs every algorithm of a preset with the given overrides.
pub fn run_demo(demo: Demo, settings: &Settings) -> Result<DemoOutcome, CliError> {
    let runs = if let Some(p) = control_preset(demo) {
        p.algorithms
            .iter()
            .map(|&a| run_control(a, p.system.as_ref(), &p.target, &p.u0, settings))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let inputs = mean_preset(demo).expect("every preset is a control or a mean problem");
        [Algorithm::Riemannian, Algorithm::Natural]
            .iter()
            .map(|&a| run_mean(a, &inputs, settings))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(DemoOutcome::from_runs(demo.name(), runs))
}
