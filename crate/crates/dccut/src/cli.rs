//! The `dccut` command line.
//!
//! ```text
//! dccut solve [OPTIONS] <INSTANCE>
//! dccut sweep [OPTIONS] <INSTANCE>
//! ```
//!
//! `solve` exits with 0 on an optimal or eps-optimal result, 2 when the
//! instance is infeasible, 3 when a limit was reached, and 1 on usage or I/O
//! errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dccut_core::{Algorithm, SolveStatus, SolverConfig};

use crate::report::RunRecord;
use crate::sweep::{self, DEFAULT_CELL_BUDGET_S};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

pub fn exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Optimal | SolveStatus::EpsOptimal => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::LimitReached => EXIT_LIMIT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "dccut",
    version,
    about = "Cutting-plane solver for mixed-binary linear programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and write a report.
    Solve(SolveArgs),
    /// Solve one instance for every (algorithm, nlap) pair and write a CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Lapcut,
    Dccut,
    #[value(name = "dccut-v1")]
    DccutV1,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Lapcut => Algorithm::LapCut,
            AlgoArg::Dccut => Algorithm::DcCut,
            AlgoArg::DccutV1 => Algorithm::DcCutV1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    /// The bound trace, one row per iteration.
    Csv,
}

/// Solver settings shared by both subcommands.
#[derive(Debug, Args)]
struct SolverArgs {
    /// Path to a `.mblp` or `.mps` file, or a bundled instance name
    /// (ex_a, ex_b, sample_10_0_10, sample_30_0_10).
    instance: String,
    /// Penalty weight.
    #[arg(long, default_value_t = 500.0)]
    t: f64,
    /// Absolute gap tolerance on UB - LB.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Parallel workers.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seconds, checked between iterations.
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Best known objective value, used for clgap.
    #[arg(long, allow_hyphen_values = true)]
    fbest: Option<f64>,
    #[arg(long = "max-iterations", default_value_t = 10_000)]
    max_iterations: usize,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: SolverArgs,
    #[arg(long, value_enum, default_value_t = AlgoArg::Dccut)]
    algo: AlgoArg,
    /// Lift-and-project cuts per fractional point.
    #[arg(long, default_value_t = 1)]
    nlap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: SolverArgs,
    /// Algorithms to compare.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Lapcut, AlgoArg::Dccut])]
    algos: Vec<AlgoArg>,
    /// nlap values to sweep.
    #[arg(long = "nlap-values", value_delimiter = ',', default_values_t = [1, 3, 5, 7, 9])]
    nlap_values: Vec<usize>,
    /// Time budget per cell, in seconds.
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET_S)]
    budget: f64,
}

impl SolverArgs {
    fn config(&self, algo: Algorithm, nlap: usize) -> SolverConfig {
        SolverConfig {
            algo,
            t: self.t,
            eps: self.eps,
            nlap,
            workers: self.workers,
            time_limit: self.time_limit,
            seed: self.seed,
            fbest: self.fbest,
            max_iterations: self.max_iterations,
            ..SolverConfig::default()
        }
    }

    fn sink<'a>(&self, stdout: &'a mut dyn Write) -> io::Result<Box<dyn Write + 'a>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(stdout),
        })
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(&args, stdout),
        Command::Sweep(args) => run_sweep(&args, stdout),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32, String> {
    let (inst, name) = crate::load_instance(&args.common.instance).map_err(|e| e.to_string())?;
    let cfg = args.common.config(args.algo.into(), args.nlap);
    cfg.validate().map_err(|e| e.to_string())?;
    log::info!(
        "solving {name} (n={}, q={}, m={}) with {}",
        inst.n(),
        inst.q(),
        inst.m(),
        cfg.algo.as_str()
    );
    let report = crate::solve(&inst, &cfg).map_err(|e| e.to_string())?;
    let record = RunRecord::new(&name, &cfg, &report);
    let mut out = args
        .common
        .sink(stdout)
        .map_err(|e| format!("cannot open output: {e}"))?;
    match args.format {
        Format::Text => record.write_text(&mut out).map_err(|e| e.to_string())?,
        Format::Json => record.write_json(&mut out).map_err(|e| e.to_string())?,
        Format::Csv => record
            .write_trace_csv(&mut out)
            .map_err(|e| e.to_string())?,
    }
    out.flush().map_err(|e| e.to_string())?;
    Ok(exit_code(report.status))
}

fn run_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<i32, String> {
    let (inst, name) = crate::load_instance(&args.common.instance).map_err(|e| e.to_string())?;
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN is rejected too
    if !(args.budget > 0.0) {
        return Err("--budget must be positive".into());
    }
    let base = args.common.config(Algorithm::DcCut, 1);
    base.validate().map_err(|e| e.to_string())?;
    let algos: Vec<Algorithm> = args.algos.iter().map(|&a| a.into()).collect();
    log::info!(
        "sweeping {name}: {} cells",
        algos.len() * args.nlap_values.len()
    );
    let rows = sweep::run_sweep(&inst, &base, &algos, &args.nlap_values, args.budget);
    let mut out = args
        .common
        .sink(stdout)
        .map_err(|e| format!("cannot open output: {e}"))?;
    sweep::write_csv(&rows, &mut out).map_err(|e| e.to_string())?;
    out.flush().map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}
