//! Verification front end for the coderivative toolkit.
//!
//! Every command runs a suite of checks against the analytic layer and
//! emits a machine-readable report. Exit codes: 0 when every assertion in
//! the suite passes, 1 when an assertion backed by the analysis fails,
//! 2 on usage errors, 3 on runtime errors. All sampling is determined by
//! `--seed` (or the `CODERIV_SEED` environment variable), and identical
//! invocations produce byte-identical reports.

mod commands;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{Body, CliError, CommandOutput};
use coderiv::covering::Method;
use coderiv::MapId;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapArg {
    F,
    G,
    H,
}

impl From<MapArg> for MapId {
    fn from(m: MapArg) -> MapId {
        match m {
            MapArg::F => MapId::F2,
            MapArg::G => MapId::G4,
            MapArg::H => MapId::H4,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Spectral,
    Definitional,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Definitional => Method::Definitional,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "coderiv",
    version,
    about = "Verification suites for a family of norm-preserving mappings: \
             derivative checks, origin probes, covering-constant estimates, \
             exact identities, and coincidence-equation solving."
)]
struct Cli {
    /// Master seed; fully determines all sampling.
    #[arg(long, global = true, env = "CODERIV_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Report format. JSON is canonical; CSV is a flat projection whose
    /// columns are listed in each subcommand's help.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare an analytic derivative matrix against central finite
    /// differences at seeded random points.
    ///
    /// CSV columns: map, seed, samples, fd_step, tol, max_abs_error, pass.
    VerifyJacobians {
        /// Mapping to check.
        #[arg(long, value_enum)]
        map: MapArg,
        /// Number of sample points.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Central-difference step.
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
        /// Maximum admissible entrywise deviation.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },

    /// Probe the coderivative of the planar map at the origin: directional
    /// rejection cases, the rejection certificate for a candidate vector,
    /// and a sampled upper estimate of the defining limsup.
    ///
    /// CSV columns: label, dir1, dir2, condition_strict, predicted_limit,
    /// measured_limit, converged.
    ProbeOrigin {
        /// Dual vector, as `y1,y2`.
        #[arg(long)]
        y: String,
        /// Candidate vector, as `x1,x2` (defaults to the origin).
        #[arg(long)]
        x: Option<String>,
        /// Sphere directions per radius for the sampled estimate.
        #[arg(long, default_value_t = 256)]
        dirs: usize,
        /// Agreement tolerance between measured and predicted limits.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },

    /// Covering-constant estimate at a point, with the assertion the
    /// analysis makes there (constant one for the planar and blockwise
    /// maps, closed-form upper bounds for the shared-norm map).
    ///
    /// CSV columns: map, method, seed, eta, inf, estimate, pass (one row
    /// per eta).
    Covering {
        /// Mapping to estimate.
        #[arg(long, value_enum)]
        map: MapArg,
        /// Center point, `x1,x2` or `x1,x2,x3,x4` to match the map.
        #[arg(long)]
        point: String,
        /// Ball radii, comma-separated and decreasing (default 1e-1..1e-6).
        #[arg(long)]
        etas: Option<String>,
        /// Dual-vector samples per point (definitional strategy).
        #[arg(long, default_value_t = 512)]
        y_samples: usize,
        /// Ball samples per radius.
        #[arg(long, default_value_t = 128)]
        z_samples: usize,
        /// Inner-infimum strategy.
        #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
        method: MethodArg,
        /// Assertion tolerance (defaults: 1e-9 spectral, 1e-3 definitional).
        #[arg(long)]
        tol: Option<f64>,
    },

    /// Exact polynomial verification of the expansion and norm identities,
    /// cross-validated numerically at seeded random substitutions.
    ///
    /// CSV columns: expansion_2d, expansion_4d, block_norm,
    /// numeric_max_mismatch, pass.
    Identities,

    /// Solve the coincidence equation of a scenario file at one parameter
    /// value and verify the distance bound.
    ///
    /// CSV columns: s, converged, sigma1, sigma2, residual, distance,
    /// bound, bound_satisfied, iterations, error.
    Solve {
        /// Scenario file (flat key-value format).
        #[arg(long)]
        scenario: PathBuf,
        /// Parameter value.
        #[arg(long)]
        s: f64,
        /// Override the scenario's rate parameter (beta < alpha < 1).
        #[arg(long)]
        alpha: Option<f64>,
    },

    /// Solve over a parameter grid with warm starts; failures are recorded
    /// per entry. JSON output is one compact object per line.
    ///
    /// CSV columns: s, converged, sigma1, sigma2, residual, distance,
    /// bound, bound_satisfied, iterations, error.
    Sweep {
        /// Scenario file (flat key-value format).
        #[arg(long)]
        scenario: PathBuf,
        /// Inclusive grid `start:end:step`.
        #[arg(long)]
        s_grid: String,
        /// Override the scenario's rate parameter.
        #[arg(long)]
        alpha: Option<f64>,
    },
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::VerifyJacobians {
            map,
            samples,
            fd_step,
            tol,
        } => commands::verify_jacobians((*map).into(), *samples, *fd_step, *tol, cli.seed),
        Command::ProbeOrigin { y, x, dirs, tol } => {
            commands::probe_origin(y, x.as_deref(), *dirs, *tol, cli.seed)
        }
        Command::Covering {
            map,
            point,
            etas,
            y_samples,
            z_samples,
            method,
            tol,
        } => commands::covering_cmd(commands::CoveringArgs {
            map: (*map).into(),
            point: point.clone(),
            etas: etas.clone(),
            y_samples: *y_samples,
            z_samples: *z_samples,
            method: (*method).into(),
            tol: *tol,
            seed: cli.seed,
        }),
        Command::Identities => commands::identities(cli.seed),
        Command::Solve { scenario, s, alpha } => commands::solve(scenario, *s, *alpha, cli.seed),
        Command::Sweep {
            scenario,
            s_grid,
            alpha,
        } => commands::sweep(scenario, s_grid, *alpha, cli.seed),
    }
}

fn render(output: &CommandOutput, format: FormatArg) -> String {
    match format {
        FormatArg::Json => match &output.body {
            Body::Single(value) => report::to_json(value),
            Body::Lines(values) => report::to_json_lines(values.iter()),
        },
        FormatArg::Csv => report::to_csv(&output.csv_header, &output.csv_rows),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let rendered = render(&output, cli.format);
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            } else {
                print!("{rendered}");
            }
            if output.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
