//! Batch front end for `hykg`.
//!
//! ```text
//! hykg spectrum|wavefunction|audit|oracle|selftest --config <path> [--n-max K] [--jobs J] [--out DIR]
//! ```
//!
//! Exit codes: 0 success, 1 selftest failure, 2 config error, 3 I/O error,
//! 4 missing level.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::commands::Point;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_atomic, Csv};

#[derive(Debug, Parser)]
#[command(name = "hykg", version, about = "Klein-Gordon bound states of the Hylleraas potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `run.n_max`.
    #[arg(long = "n-max")]
    pub n_max: Option<u32>,
    /// Worker threads for sweeps and per-level work.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory; overrides `run.out` (default: current directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels of every selected engine: spectrum.csv.
    Spectrum(Common),
    /// Closed-form and oracle radial functions: wf_n{n}.csv plus a sidecar.
    Wavefunction {
        #[command(flatten)]
        common: Common,
        /// Only this level (default: every n up to n_max).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Cross-engine audit: audit.json and audit.csv.
    Audit(Common),
    /// Numerical oracle levels: oracle.csv.
    Oracle(Common),
    /// Embedded fixture suite.
    Selftest {
        /// Accepted for a uniform interface; fixtures need no config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scale one fixture's expected values by 1 + 1e-3 (harness check).
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Spectrum,
    Wavefunction(Option<u32>),
    Audit,
    Oracle,
}

/// Runs a parsed command, printing written paths to stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, common) = match cli.command {
        Command::Selftest { perturb, .. } => {
            print!("{}", commands::cmd_selftest(perturb.as_deref())?);
            return Ok(());
        }
        Command::Spectrum(c) => (Kind::Spectrum, c),
        Command::Wavefunction { common, n } => (Kind::Wavefunction(n), common),
        Command::Audit(c) => (Kind::Audit, c),
        Command::Oracle(c) => (Kind::Oracle, c),
    };
    let mut config = RunConfig::load(&common.config)?;
    if let Some(n) = common.n_max {
        config.run.n_max = n;
        config.validate()?;
    }
    if common.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let out = common
        .out
        .clone()
        .or_else(|| config.run.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let written = pool.install(|| execute(&config, kind, &out))?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn run_point(point: &Point, kind: Kind, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    match kind {
        Kind::Spectrum => commands::cmd_spectrum(point, out),
        Kind::Wavefunction(n) => commands::cmd_wavefunction(point, n, out),
        Kind::Audit => commands::cmd_audit(point, out),
        Kind::Oracle => commands::cmd_oracle(point, out),
    }
}

fn execute(config: &RunConfig, kind: Kind, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let points = config.points()?;
    let Some(sweep) = &config.sweep else {
        let point = Point::new(config, points[0].1)?;
        return run_point(&point, kind, out);
    };
    // Sweep: one subdirectory per point, run concurrently; the index is
    // written once every point has finished.
    let results: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, (_, params))| {
            let dir = out.join(format!("point_{i:03}"));
            let res = Point::new(config, *params).and_then(|p| run_point(&p, kind, &dir));
            (dir, res)
        })
        .collect();
    let mut index = Csv::new(&["index", "param", "value", "dir", "status"]);
    let mut written = Vec::new();
    let mut first_err = None;
    for (i, ((value, _), (dir, res))) in points.iter().zip(results).enumerate() {
        let status = match res {
            Ok(paths) => {
                written.extend(paths);
                "ok".to_string()
            }
            Err(e) => {
                let code = e.exit_code();
                first_err.get_or_insert(e);
                format!("exit{code}")
            }
        };
        let name = dir.file_name().map(|d| d.to_string_lossy().into_owned()).unwrap_or_default();
        index.row([
            i.to_string(),
            sweep.param.clone(),
            hykg::audit::format_float(value.expect("sweep points carry a value")),
            name,
            status,
        ]);
    }
    written.push(write_atomic(out, "index.csv", &index.finish())?);
    match first_err {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
