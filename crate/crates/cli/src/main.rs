//! `morse-lsm`: sample Morse transition-dipole fields over a parameter
//! rectangle, extract equal-value contours, and measure their motion under
//! the scale map `(a, C) -> (a/s, C s)`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 domain error, 3 convergence
//! failure.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Fixture, GridSpec, Overrides};
use morse_lsm::Error;

#[derive(Parser)]
#[command(name = "morse-lsm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the sweep subcommands (`field`, `contours`, `speeds`,
/// `advect`).
#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// Parameter rectangle as a_min,a_max,n_a,C_min,C_max,n_C
    #[arg(long = "grid", value_name = "SPEC")]
    grid: Option<GridSpec>,
    /// Scale values (comma-separated, strictly increasing)
    #[arg(long = "s", value_delimiter = ',', value_name = "S,...")]
    s: Option<Vec<f64>>,
    /// Explicit contour level
    #[arg(long = "level", value_name = "VALUE")]
    level: Option<f64>,
    /// Contour level as a percentile of the first field (default 50)
    #[arg(long = "level-percentile", value_name = "PCT")]
    level_percentile: Option<f64>,
    /// Worker thread count for field sampling
    #[arg(long = "workers", value_name = "N")]
    workers: Option<usize>,
    /// Output directory (default $MORSE_LSM_OUT, then ".")
    #[arg(long = "out", value_name = "DIR")]
    out: Option<PathBuf>,
    /// Use a synthetic field family instead of physics solves
    #[arg(long = "fixture", value_enum, value_name = "NAME")]
    fixture: Option<Fixture>,
    /// JSON config file; flags given here override its values
    #[arg(long = "config", value_name = "PATH")]
    config: Option<PathBuf>,
}

impl SweepArgs {
    fn resolve(&self) -> morse_lsm::Result<config::RunConfig> {
        config::resolve(
            self.config.as_deref(),
            Overrides {
                grid: self.grid,
                s_list: self.s.clone(),
                level: self.level,
                level_percentile: self.level_percentile,
                out: self.out.clone(),
                workers: self.workers,
                fixture: self.fixture,
            },
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single Morse well: energies, bound count, and d01
    Solve {
        /// Well depth C
        #[arg(long = "C")]
        c: f64,
        /// Inverse width a
        #[arg(long = "a")]
        a: f64,
        /// Equilibrium position r0
        #[arg(long = "r0", default_value_t = 1.0)]
        r0: f64,
        /// Scale value applied before solving
        #[arg(long = "s", default_value_t = 1.0)]
        s: f64,
        /// Emit a JSON report instead of the text table
        #[arg(long = "json")]
        json: bool,
        /// JSON config file (solver tolerances)
        #[arg(long = "config", value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Sample the d01 field at every scale and write field files
    Field {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Recompute even when an up-to-date field file exists
        #[arg(long = "force")]
        force: bool,
    },
    /// Extract equal-d01 contours from the field files
    Contours {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Also write an overlay SVG figure
        #[arg(long = "svg")]
        svg: bool,
    },
    /// Measure average normal speeds between consecutive scales
    Speeds {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Print mean-of-means and relative spread
        #[arg(long = "summary")]
        summary: bool,
    },
    /// Check constant-speed advection against the recomputed contours
    Advect {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Emit the report as JSON
        #[arg(long = "json")]
        json: bool,
    },
}

fn install_worker_pool(workers: Option<usize>) {
    if let Some(n) = workers {
        // per-process pool; ignore the error if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> morse_lsm::Result<()> {
    match cli.command {
        Command::Solve { c, a, r0, s, json, config } => {
            let cfg = config::resolve(config.as_deref(), Overrides::default())?;
            commands::cmd_solve(c, a, r0, s, json, &cfg)
        }
        Command::Field { sweep, force } => {
            let cfg = sweep.resolve()?;
            install_worker_pool(cfg.workers);
            commands::cmd_field(&cfg, force)
        }
        Command::Contours { sweep, svg } => {
            let cfg = sweep.resolve()?;
            install_worker_pool(cfg.workers);
            commands::cmd_contours(&cfg, svg)
        }
        Command::Speeds { sweep, summary } => {
            let cfg = sweep.resolve()?;
            install_worker_pool(cfg.workers);
            commands::cmd_speeds(&cfg, summary)
        }
        Command::Advect { sweep, json } => {
            let cfg = sweep.resolve()?;
            install_worker_pool(cfg.workers);
            commands::cmd_advect(&cfg, json)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) => 1,
                Error::Domain(_) | Error::Format(_) => 2,
                Error::Convergence { .. } => 3,
            };
            ExitCode::from(code)
        }
    }
}
