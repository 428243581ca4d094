//! Command-line front end for `tubetail-core`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use tubetail_core::excursion::{self, fmt_f64};
use tubetail_core::{montecarlo, p_tube_raw, report_grid, simulate_pmax, solve_threshold, Method};

pub mod cases;
pub mod config;

pub use cases::{Case, ALL_CASES};
pub use config::{ExperimentConfig, GridSpec, ThresholdSpec};

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, flags or I/O (exit 1).
    Validation(String),
    /// A numerical routine did not converge or a value is undefined (exit 2).
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tubetail_core::Error> for CliError {
    fn from(e: tubetail_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "tubetail", version, about = "Tube approximation, exact excursion probabilities and their relative error")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file (stdout if omitted); a directory for `reproduce` without `--case`.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Threshold grid, overriding the config.
    #[arg(long = "c-grid", global = true, value_name = "START:STOP:STEP")]
    pub c_grid: Option<GridSpec>,

    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,

    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bonferroni (tube) probabilities over the grid.
    Approx,
    /// Exact excursion probabilities over the grid.
    Exact,
    /// Monte Carlo estimates of Pr(max T ≥ c).
    Simulate,
    /// Relative error, its asymptotic prediction and the lower bound.
    Error,
    /// Threshold c with P(c) equal to a target.
    Threshold {
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Data for the reference experiments; all four cases if `--case` is omitted.
    Reproduce {
        #[arg(long, value_enum, value_name = "NAME")]
        case: Option<Case>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Tube,
    Exact,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tube => Method::Tube,
            MethodArg::Exact => Method::Exact,
        }
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.trials == Some(0) {
        return Err(CliError::validation("trials must be at least 1"));
    }
    if let Command::Reproduce { case } = &cli.command {
        return run_reproduce(cli, *case);
    }
    let path = cli.config.as_deref().ok_or_else(|| CliError::validation("--config is required"))?;
    let cfg = ExperimentConfig::load(path)?;
    let config = cfg.build_configuration()?;
    let law = cfg.law;
    let out_path = cli.out.clone().or_else(|| cfg.output.clone());
    let trials = cli.trials.unwrap_or(cfg.trials);
    let seed = cli.seed.unwrap_or(cfg.seed);
    let grid = || -> Result<Vec<f64>, CliError> {
        cli.c_grid
            .or(cfg.grid)
            .ok_or_else(|| CliError::validation("no threshold grid: give `grid` in the config or --c-grid"))?
            .values()
    };

    let mut buf = Vec::new();
    match &cli.command {
        Command::Approx => {
            let grid = grid()?;
            writeln!(buf, "c,p_tube,p_tube_capped")?;
            for c in grid {
                let p = p_tube_raw(&config, &law, c)?;
                writeln!(buf, "{},{},{}", fmt_f64(c), fmt_f64(p), fmt_f64(p.min(1.0)))?;
            }
        }
        Command::Exact => {
            let grid = grid()?;
            let rows = grid
                .par_iter()
                .map(|&c| tubetail_core::exact_parts(&config, &law, c, &Default::default()))
                .collect::<tubetail_core::Result<Vec<_>>>()?;
            writeln!(buf, "c,p_tube,p_exact,p_exact_se")?;
            for (c, parts) in grid.iter().zip(&rows) {
                let se = parts.p_exact_se().map(fmt_f64).unwrap_or_default();
                writeln!(buf, "{},{},{},{}", fmt_f64(*c), fmt_f64(parts.p_tube_raw()), fmt_f64(parts.p_exact()), se)?;
            }
        }
        Command::Simulate => {
            let sim = simulate_pmax(&config, &law, &grid()?, trials, seed)?;
            montecarlo::write_csv(&mut buf, &sim)?;
        }
        Command::Error => {
            let rows = report_grid(&config, &law, &grid()?)?;
            excursion::write_csv(&mut buf, &rows)?;
        }
        Command::Threshold { target, method } => {
            let spec = match (target, cfg.threshold) {
                (Some(t), from_cfg) => ThresholdSpec {
                    target: *t,
                    method: method.map(Method::from).or(from_cfg.map(|s| s.method)).unwrap_or(Method::Exact),
                },
                (None, Some(s)) => ThresholdSpec { target: s.target, method: method.map(Method::from).unwrap_or(s.method) },
                (None, None) => return Err(CliError::validation("no target: give --target or `threshold` in the config")),
            };
            let c = solve_threshold(&config, &law, spec.target, spec.method)?;
            let name = match spec.method {
                Method::Tube => "tube",
                Method::Exact => "exact",
            };
            writeln!(buf, "target,method,c")?;
            writeln!(buf, "{},{},{}", fmt_f64(spec.target), name, fmt_f64(c))?;
        }
        Command::Reproduce { .. } => unreachable!(),
    }
    emit(out_path.as_deref(), &buf)
}

fn run_reproduce(cli: &Cli, case: Option<Case>) -> Result<(), CliError> {
    let trials = cli.trials.unwrap_or(montecarlo::DEFAULT_TRIALS);
    let seed = cli.seed.unwrap_or(cases::DEFAULT_SEED);
    let one = |case: Case| -> Result<Vec<u8>, CliError> {
        let grid = cli.c_grid.unwrap_or_else(|| case.default_grid()).values()?;
        let mut buf = Vec::new();
        cases::reproduce(case, &grid, trials, seed, &mut buf)?;
        Ok(buf)
    };
    match case {
        Some(case) => emit(cli.out.as_deref(), &one(case)?),
        None => {
            let dir = cli
                .out
                .as_deref()
                .ok_or_else(|| CliError::validation("reproduce without --case needs --out DIR"))?;
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::validation(format!("cannot create {}: {e}", dir.display())))?;
            for case in ALL_CASES {
                emit(Some(&dir.join(format!("{}.csv", case.name()))), &one(case)?)?;
            }
            Ok(())
        }
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::validation(format!("cannot write {}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            w.write_all(bytes)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()?;
        }
    }
    Ok(())
}
