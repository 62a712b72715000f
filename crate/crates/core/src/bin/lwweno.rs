//! Command-line front end: single runs, refinement studies and the DMR
//! timing benchmark.
//!
//! Exit codes: 0 on success, 2 when a run aborts on a positivity failure,
//! 1 for every configuration, usage or I/O error.

use std::fs::File;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lwweno::bench::{self, BenchConfig};
use lwweno::convergence;
use lwweno::problems::ProblemId;
use lwweno::run::{solve, RunConfig};
use lwweno::solver::{Scheme, SchemeConfig};
use lwweno::{Result, SolverError};

#[derive(Parser)]
#[command(name = "lwweno", version, about = "WENO finite differences with Lax-Wendroff time stepping")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem to its end time.
    Solve(SolveArgs),
    /// Grid-refinement study written as CSV.
    Convergence(ConvergenceArgs),
    /// Time RK3 against the Lax-Wendroff schemes on the double Mach reflection.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// rk3, lw, lwa, lwf or lwaf.
    #[arg(long)]
    scheme: Scheme,
    #[arg(long, default_value_t = 5)]
    space_order: usize,
    #[arg(long, default_value_t = 5)]
    time_order: usize,
    #[arg(long, default_value_t = 0.5)]
    cfl: f64,
    /// Turn lw/lwa into lwf/lwaf.
    #[arg(long)]
    fluctuation_control: bool,
    /// Abort when a Taylor sample inside the recursion is inadmissible,
    /// instead of only requiring it to be in the flux's domain.
    #[arg(long)]
    strict_samples: bool,
}

impl SchemeArgs {
    fn config(&self) -> Result<SchemeConfig> {
        let scheme = if self.fluctuation_control { self.scheme.with_fluctuation_control()? } else { self.scheme };
        let time_order = if scheme == Scheme::Rk3 { 3 } else { self.time_order };
        Ok(SchemeConfig::new(scheme, self.space_order, time_order, self.cfl).with_strict_samples(self.strict_samples))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// advection, burgers, euler1d, euler2d-smooth or dmr.
    #[arg(long)]
    problem: ProblemId,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: Option<usize>,
    /// End time (problem default when omitted).
    #[arg(long)]
    tend: Option<f64>,
    /// Directory for field dumps and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dump_every: Option<usize>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[arg(long)]
    problem: ProblemId,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Comma-separated resolutions, e.g. 40,80,160.
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<usize>,
    #[arg(long)]
    tend: Option<f64>,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    nx: usize,
    #[arg(long, default_value_t = 0.2)]
    tend: f64,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(a) => {
            if a.dump_every.is_some() && a.out.is_none() {
                return Err(SolverError::Config("--dump-every needs --out".into()));
            }
            let cfg = RunConfig {
                ny: a.ny,
                tend: a.tend,
                out: a.out,
                dump_every: a.dump_every,
                ..RunConfig::new(a.problem, a.scheme.config()?, a.nx)
            };
            let (_, summary) = solve(&cfg)?;
            let json = serde_json::to_string_pretty(&summary).map_err(|e| SolverError::Io(e.to_string()))?;
            println!("{json}");
        }
        Command::Convergence(a) => {
            let rows = convergence::convergence_study(a.problem, &a.scheme.config()?, &a.levels, a.tend)?;
            match a.out {
                Some(path) => convergence::write_csv(&rows, File::create(path)?)?,
                None => convergence::write_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::Bench(a) => {
            let cfg = BenchConfig { nx: a.nx, tend: a.tend, ..BenchConfig::default() };
            let rows = bench::bench_efficiency(&cfg)?;
            match a.out {
                Some(path) => bench::write_csv(&rows, File::create(path)?)?,
                None => bench::write_csv(&rows, io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_positivity() { 2 } else { 1 })
        }
    }
}
