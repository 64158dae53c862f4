use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hpd_cli::demo::{
    control_preset, mean_preset, run_control, run_demo, run_mean, write_csv_file, Algorithm, Demo,
    DemoOutcome, Settings,
};
use hpd_cli::error::{exit, CliError};
use hpd_cli::export::{sample_parameters, write_samples, write_trajectory, write_triangle};
use hpd_cli::format::fmt_sig;
use hpd_cli::io::{matrix_json, parse_csv_floats, read_hpd, read_system, write_text};
use hpd_core::exec::Execution;
use hpd_core::geometry::{distance, geodesic, midpoint, GeodesicSegment};
use hpd_core::karcher::geodesic_triangle;
use hpd_core::matrix::{ComplexMatrix, HpdMatrix, C64};
use hpd_core::system::{CouplingSystem, DiagonalSystem, ParamSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `println!` that tolerates a closed pipe (`hpd demo ... | head`); the exit
/// code still reflects the computation.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

/// Geometry of Hermitian positive-definite matrices: distances, geodesics,
/// matrix control and Karcher means.
#[derive(Debug, Parser)]
#[command(name = "hpd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Learning rate (defaults depend on the algorithm).
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Stopping tolerance.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Iteration cap.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Output file (a directory for `demo`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for `random`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress run summaries on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Geodesic distance between two HPD matrices.
    Distance { a: PathBuf, b: PathBuf },
    /// Point on the geodesic from A to B, or samples along it with --samples.
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, required_unless_present = "samples")]
        t: Option<f64>,
        /// Write this many evenly spaced points as CSV instead.
        #[arg(long, conflicts_with = "t")]
        samples: Option<usize>,
    },
    /// Geodesic midpoint of two HPD matrices.
    Midpoint { a: PathBuf, b: PathBuf },
    /// Steer a parametrised system toward a target matrix.
    Control {
        #[arg(long, value_enum)]
        demo: Option<ControlDemo>,
        #[arg(long, value_enum, default_value = "natural")]
        algo: Algorithm,
        /// m1, m2, or file:<system.json>.
        #[arg(long, required_unless_present = "demo")]
        system: Option<String>,
        #[arg(long, required_unless_present = "demo")]
        target: Option<PathBuf>,
        /// Initial input, comma separated.
        #[arg(long, required_unless_present = "demo")]
        u0: Option<String>,
    },
    /// Karcher mean of HPD matrices.
    Karcher {
        #[arg(long, value_enum)]
        demo: Option<MeanDemo>,
        #[arg(long, value_enum, default_value = "natural")]
        algo: Algorithm,
        #[arg(long, value_delimiter = ',', num_args = 1.., required_unless_present = "demo")]
        inputs: Vec<PathBuf>,
        /// Evaluate per-input terms on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Sides and medians of the geodesic triangle on three matrices.
    Triangle {
        /// Exactly three matrix files.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Run a built-in example with every applicable algorithm.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
    /// Random HPD matrix as JSON, reproducible from --seed.
    Random {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value = "hpd")]
        kind: RandomKind,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ControlDemo {
    #[value(name = "example-3.1")]
    Example31,
    #[value(name = "example-3.2")]
    Example32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeanDemo {
    #[value(name = "example-4.1")]
    Example41,
    #[value(name = "example-4.2")]
    Example42,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RandomKind {
    Hpd,
    Toeplitz,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the input-error code; 2 means "not converged".
            return ExitCode::from(if e.use_stderr() { exit::INPUT as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    if cli.eta.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
        return Err(CliError::Usage("--eta must be positive".into()));
    }
    if cli.eps.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
        return Err(CliError::Usage("--eps must be positive".into()));
    }
    if cli.max_iter == Some(0) {
        return Err(CliError::Usage("--max-iter must be at least 1".into()));
    }
    Ok(Settings {
        eta: cli.eta,
        eps: cli.eps,
        max_iter: cli.max_iter,
        execution: Execution::default(),
    })
}

/// Prints to stdout, or writes to `--out` when given.
fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_text(path, &format!("{text}\n")),
        None => {
            say!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let settings = settings(cli)?;
    match &cli.command {
        Command::Distance { a, b } => {
            emit(cli, &fmt_sig(distance(&read_hpd(a)?, &read_hpd(b)?)?))?;
            Ok(exit::CONVERGED)
        }
        Command::Geodesic { a, b, t, samples } => {
            let (a, b) = (read_hpd(a)?, read_hpd(b)?);
            match (t, samples) {
                (Some(t), _) => {
                    if !(0.0..=1.0).contains(t) {
                        eprintln!(
                            "warning: t = {t} extrapolates beyond the segment between the inputs"
                        );
                    }
                    emit(cli, &matrix_json(geodesic(&a, &b, *t)?.as_complex()))?
                }
                (None, Some(count)) => {
                    let seg = GeodesicSegment::new(&a, &b)?;
                    let points = sample_parameters(*count)
                        .into_iter()
                        .map(|t| Ok((t, seg.at(t)?)))
                        .collect::<Result<Vec<_>, CliError>>()?;
                    match &cli.out {
                        Some(path) => write_csv_file(path, |f| write_samples(f, &points))?,
                        None => write_samples(std::io::stdout().lock(), &points)?,
                    }
                }
                (None, None) => unreachable!("clap requires --t or --samples"),
            }
            Ok(exit::CONVERGED)
        }
        Command::Midpoint { a, b } => {
            emit(
                cli,
                &matrix_json(midpoint(&read_hpd(a)?, &read_hpd(b)?)?.as_complex()),
            )?;
            Ok(exit::CONVERGED)
        }
        Command::Control {
            demo,
            algo,
            system,
            target,
            u0,
        } => {
            let (name, system, target, u0): (String, Box<dyn ParamSystem>, HpdMatrix, Vec<f64>) =
                match demo {
                    Some(d) => {
                        let d = match d {
                            ControlDemo::Example31 => Demo::Example31,
                            ControlDemo::Example32 => Demo::Example32,
                        };
                        let p = control_preset(d).expect("control preset");
                        (d.name().to_owned(), p.system, p.target, p.u0)
                    }
                    None => (
                        "control".to_owned(),
                        parse_system_arg(system.as_deref().expect("clap enforces --system"))?,
                        read_hpd(target.as_deref().expect("clap enforces --target"))?,
                        parse_csv_floats(u0.as_deref().expect("clap enforces --u0"))?,
                    ),
                };
            let run = run_control(*algo, system.as_ref(), &target, &u0, &settings)?;
            finish_single(cli, &name, run)
        }
        Command::Karcher {
            demo,
            algo,
            inputs,
            sequential,
        } => {
            let (name, matrices) = match demo {
                Some(d) => {
                    let d = match d {
                        MeanDemo::Example41 => Demo::Example41,
                        MeanDemo::Example42 => Demo::Example42,
                    };
                    (d.name().to_owned(), mean_preset(d).expect("mean preset"))
                }
                None => (
                    "karcher".to_owned(),
                    inputs
                        .iter()
                        .map(|p| read_hpd(p))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            let settings = Settings {
                execution: if *sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                ..settings
            };
            let run = run_mean(*algo, &matrices, &settings)?;
            finish_single(cli, &name, run)
        }
        Command::Triangle { inputs, samples } => {
            if inputs.len() != 3 {
                return Err(CliError::Usage(format!(
                    "triangle needs 3 inputs, got {}",
                    inputs.len()
                )));
            }
            let m = inputs
                .iter()
                .map(|p| read_hpd(p))
                .collect::<Result<Vec<_>, _>>()?;
            let tri = geodesic_triangle(&m[0], &m[1], &m[2], *samples, Execution::default())?;
            if let Some(path) = &cli.out {
                write_csv_file(path, |f| write_triangle(f, &tri))?;
            }
            if !cli.quiet {
                say!("median_a,median_b,min_distance,s,t");
                for g in &tri.gaps {
                    say!(
                        "{},{},{},{},{}",
                        g.first + 1,
                        g.second + 1,
                        fmt_sig(g.distance),
                        fmt_sig(g.s),
                        fmt_sig(g.t)
                    );
                }
            }
            Ok(exit::CONVERGED)
        }
        Command::Demo { name } => {
            let outcome = run_demo(*name, &settings)?;
            if let Some(dir) = &cli.out {
                outcome.write(dir)?;
            }
            report(cli, &outcome);
            Ok(outcome.exit_code())
        }
        Command::Random { n, kind } => {
            if *n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let m = match kind {
                RandomKind::Hpd => random_hpd(&mut rng, *n),
                RandomKind::Toeplitz => random_toeplitz(&mut rng, *n),
            };
            emit(cli, &matrix_json(&m))?;
            Ok(exit::CONVERGED)
        }
    }
}

fn parse_system_arg(spec: &str) -> Result<Box<dyn ParamSystem>, CliError> {
    match spec {
        "m1" => Ok(Box::new(CouplingSystem)),
        "m2" => Ok(Box::new(DiagonalSystem::new(2))),
        other => match other.strip_prefix("file:") {
            Some(path) => Ok(Box::new(read_system(Path::new(path))?)),
            None => Err(CliError::Usage(format!(
                "unknown system '{other}' (expected m1, m2 or file:<path>)"
            ))),
        },
    }
}

fn finish_single(
    cli: &Cli,
    name: &str,
    run: (hpd_core::trajectory::Trajectory, std::time::Duration),
) -> Result<i32, CliError> {
    let outcome = DemoOutcome::from_runs(name, vec![run]);
    if let Some(path) = &cli.out {
        write_csv_file(path, |f| write_trajectory(f, &outcome.trajectories[0]))?;
    }
    report(cli, &outcome);
    Ok(outcome.exit_code())
}

fn report(cli: &Cli, outcome: &DemoOutcome) {
    if cli.quiet {
        return;
    }
    say!("{}", outcome.report.summary());
    for r in &outcome.report.runs {
        eprintln!(
            "{}: wall time {:.3} ms",
            r.algorithm,
            r.wall_time.as_secs_f64() * 1e3
        );
    }
}

/// `G Gᴴ + n·I` with entries of `G` uniform in the unit square.
fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g: Vec<C64> = (0..n * n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let g = ComplexMatrix::from_row_major(n, &g).expect("square");
    let ggh = &g * &g.adjoint();
    &ggh + &ComplexMatrix::identity(n).scale(n as f64)
}

/// Hermitian Toeplitz with a dominant diagonal, hence positive definite.
fn random_toeplitz(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let r: Vec<C64> = (1..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let r0 = 1.0 + 2.0 * r.iter().map(|z| z.norm()).sum::<f64>();
    let entry = |i: usize, j: usize| match i.cmp(&j) {
        std::cmp::Ordering::Equal => C64::new(r0, 0.0),
        std::cmp::Ordering::Less => r[j - i - 1],
        std::cmp::Ordering::Greater => r[i - j - 1].conj(),
    };
    let flat: Vec<C64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| entry(i, j)))
        .collect();
    ComplexMatrix::from_row_major(n, &flat).expect("square")
}
