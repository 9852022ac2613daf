//! Command-line front end. Exit codes: 0 success, 2 invalid input or flags,
//! 3 solver did not converge (output is still written).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::blackwell::check_degraded;
use crate::deficiency::SolverConfig;
use crate::error::{Error, Result};
use crate::experiments::{self, RecordRow, SchemeId};
use crate::gauss::{channel_form, whiten, Dims, GaussianSystem};
use crate::io::{load_system, write_atomic};
use crate::mmi::{mmi_pid, MutualInformations};
use crate::pid::delta_hat_pid_from_parts;
use crate::report::{BlackwellJson, ComputeJson, MutualInformationJson, PidJson, Units};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gausspid", version, about = "Partial information decompositions for jointly Gaussian vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deficiency-based and MMI decompositions plus the sufficiency report.
    Compute {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Units::Nats)]
        units: Units,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// MMI decomposition only.
    Mmi {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Units::Nats)]
        units: Units,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blackwell sufficiency report.
    Blackwell {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Wishart sampling harness and write one CSV row per draw.
    Sample {
        /// One or more of s1..s4, comma separated, or `all`.
        #[arg(long, value_parser = parse_schemes)]
        scheme: SchemeList,
        /// Draws per scheme.
        #[arg(short = 'n', long = "n", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Records CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON path (stdout when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Worker threads (default: available parallelism).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Write zeros in the timing columns so repeated runs are byte-identical.
        #[arg(long)]
        no_timings: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Summary statistics of a records CSV.
    Summarize {
        /// Records CSV produced by `sample`.
        #[arg(long = "input", alias = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Covariance file: headerless CSV (needs --dims) or JSON {"dims", "sigma"}.
    #[arg(long)]
    pub cov: PathBuf,
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<Dims>,
    /// Add a small ridge to noise covariances that fail the positive definiteness check.
    #[arg(long)]
    pub ridge_jitter: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long = "max-iters", default_value_t = SolverConfig::default().max_iterations)]
    pub max_iters: usize,
    #[arg(long, default_value_t = SolverConfig::default().tolerance)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().relaxation)]
    pub relaxation: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            max_iterations: self.max_iters,
            tolerance: self.tol,
            relaxation: self.relaxation,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct SchemeList(pub Vec<SchemeId>);

fn parse_schemes(s: &str) -> std::result::Result<SchemeList, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SchemeList(SchemeId::ALL.to_vec()));
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let id: SchemeId = part.parse().map_err(|e: Error| e.to_string())?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    Ok(SchemeList(out))
}

fn parse_dims(s: &str) -> std::result::Result<Dims, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load(input: &InputArgs) -> Result<GaussianSystem> {
    let sys = load_system(&input.cov, input.dims)?;
    if input.ridge_jitter {
        Ok(sys.with_noise_ridge().0)
    } else {
        Ok(sys)
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// `compute`: returns the report and whether both directional solves converged.
pub fn cmd_compute(sys: &GaussianSystem, cfg: &SolverConfig, units: Units) -> Result<(ComputeJson, bool)> {
    let mi = MutualInformations::of(sys)?;
    let wc = whiten(&channel_form(sys)?)?;
    let report = check_degraded(&wc);
    let pid = delta_hat_pid_from_parts(&wc, mi, cfg)?;
    let mmi = mmi_pid(sys)?;
    let json = ComputeJson {
        units,
        mutual_information: MutualInformationJson::of(&mi, units),
        delta_hat: PidJson::from_delta_hat(&pid, units),
        mmi: PidJson::from_atoms(&mmi, units, None),
        blackwell: BlackwellJson::from(&report),
    };
    Ok((json, pid.converged()))
}

/// `sample`: records for every requested scheme, in scheme then index order.
pub fn cmd_sample(schemes: &[SchemeId], n: usize, seed: u64, cfg: &SolverConfig) -> Result<Vec<experiments::ExperimentRecord>> {
    let mut all = Vec::with_capacity(n * schemes.len());
    for &s in schemes {
        all.extend(experiments::run_scheme(s, n, seed, cfg)?);
    }
    Ok(all)
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Compute { input, solver, units, out } => {
            let cfg = solver.config()?;
            let sys = load(&input)?;
            let (json, converged) = cmd_compute(&sys, &cfg, units)?;
            emit(&json, out.as_deref())?;
            if !converged {
                eprintln!("warning: solver did not converge in at least one direction");
                return Ok(EXIT_NOT_CONVERGED);
            }
        }
        Command::Mmi { input, units, out } => {
            let sys = load(&input)?;
            emit(&PidJson::from_atoms(&mmi_pid(&sys)?, units, None), out.as_deref())?;
        }
        Command::Blackwell { input, out } => {
            let sys = load(&input)?;
            let report = check_degraded(&whiten(&channel_form(&sys)?)?);
            emit(&BlackwellJson::from(&report), out.as_deref())?;
        }
        Command::Sample { scheme, n, seed, out, summary, jobs, no_timings, solver } => {
            let cfg = solver.config()?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(j as usize);
            }
            let pool = pool.build().map_err(|e| Error::InvalidConfig(e.to_string()))?;
            let records = pool.install(|| cmd_sample(&scheme.0, n as usize, seed, &cfg))?;
            let rows: Vec<RecordRow> = records.iter().map(|r| r.to_row(!no_timings)).collect();
            for r in records.iter().filter(|r| r.error.is_some()) {
                eprintln!("record {} {} (seed {}) failed: {}", r.scheme, r.index, r.seed, r.error.as_deref().unwrap_or(""));
            }
            let mut buf = Vec::new();
            experiments::write_rows(&rows, &mut buf)?;
            write_atomic(&out, &buf)?;
            let stats = experiments::summarize(&rows)?;
            for s in &stats.negative_seeds {
                eprintln!("negative atom in record with seed {s}");
            }
            emit(&stats, summary.as_deref())?;
        }
        Command::Summarize { input, out } => {
            let file = std::fs::File::open(&input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let rows = experiments::read_rows(file)?;
            emit(&experiments::summarize(&rows)?, out.as_deref())?;
        }
    }
    Ok(EXIT_OK)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. }
        | Error::NumericalBreakdown(_)
        | Error::InfeasibleSigma { .. }
        | Error::SingularComposite => EXIT_NOT_CONVERGED,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
