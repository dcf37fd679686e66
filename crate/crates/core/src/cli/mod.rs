//! Command-line front end.
//!
//! Every command prints one JSON document on stdout and a short human
//! summary on stderr. Exit codes: 0 success, 2 data error, 3 plan
//! validation failure, 4 sample stream exhausted, 5 simulation below its
//! coverage threshold, 64 usage error.

mod commands;
mod document;
mod input;

use std::path::PathBuf;

use bounded_mean::{ConfidenceSchedule, Error, PrecisionGoal, Support};
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;
pub const EXIT_THRESHOLD: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(EXIT_DATA, message)
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Exhausted { .. } => EXIT_EXHAUSTED,
            Error::InvalidPlan(_) => EXIT_VALIDATION,
            Error::Domain(_) | Error::OutOfSupport { .. } | Error::NoSamples => EXIT_DATA,
        };
        CliError::new(code, err.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "bounded-mean",
    version,
    about = "Confidence intervals and multistage estimation for bounded means"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Confidence interval for the mean of bounded data.
    Ci(CiArgs),
    /// Build or run a multistage sampling plan.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Monte Carlo checks of interval coverage and plan success.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Debug, Subcommand)]
enum PlanCommand {
    Build(PlanBuildArgs),
    Run(PlanRunArgs),
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    Coverage(CoverageArgs),
    Plan(SimPlanArgs),
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[arg(long)]
    pub delta: f64,
    /// File with one observation per line.
    #[arg(long, conflicts_with_all = ["n", "mean"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "mean")]
    pub n: Option<u64>,
    /// Sample mean on the scale of --bounds.
    #[arg(long, requires = "n", allow_hyphen_values = true)]
    pub mean: Option<f64>,
    #[arg(long, default_value = "0,1", value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Support,
    /// Report the unclamped limits.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct PlanBuildArgs {
    /// absolute:<eps> | relative:<eps> | mixed:<eps_a>,<eps_r>
    #[arg(long, value_parser = parse_goal)]
    pub goal: PrecisionGoal,
    #[arg(long)]
    pub delta: f64,
    /// finite:<s> | tailed:<tau>
    #[arg(long, value_parser = parse_schedule)]
    pub schedule: ScheduleKind,
    /// Defaults to 1/(2s) for finite and 1/(2(τ+1)) for tailed schedules.
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub n1: u64,
    #[arg(long, default_value_t = 2.0)]
    pub growth: f64,
    #[arg(long, default_value = "0,1", value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Support,
    #[arg(long)]
    pub max_stages: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlanRunArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Observations consumed in order, one per line.
    #[arg(long, conflicts_with_all = ["dist", "seed"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub dist: Option<String>,
    /// Falls back to the RNG_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "0,1", value_parser = parse_bounds, allow_hyphen_values = true)]
    pub bounds: Support,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimPlanArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    Finite(usize),
    Tailed(usize),
}

impl ScheduleKind {
    pub fn with_zeta(
        self,
        zeta: Option<f64>,
        max_stages: Option<usize>,
        growth: f64,
    ) -> ConfidenceSchedule {
        let mut schedule = match self {
            ScheduleKind::Finite(s) => ConfidenceSchedule::finite(s),
            ScheduleKind::Tailed(tau) => ConfidenceSchedule::Tailed {
                tau,
                zeta: ConfidenceSchedule::tailed(tau, None).zeta(),
                max_stages,
                growth,
            },
        };
        if let Some(z) = zeta {
            match &mut schedule {
                ConfidenceSchedule::Finite { zeta, .. }
                | ConfidenceSchedule::Tailed { zeta, .. } => *zeta = z,
            }
        }
        schedule
    }
}

fn parse_bounds(s: &str) -> Result<Support, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected <a>,<b>, got '{s}'"))?;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{v}' is not a number"))
    };
    Support::new(num(a)?, num(b)?).map_err(|e| e.to_string())
}

fn parse_numbers(s: &str, count: usize) -> Option<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .ok()?;
    (v.len() == count).then_some(v)
}

fn parse_goal(s: &str) -> Result<PrecisionGoal, String> {
    let err =
        || format!("expected absolute:<eps> | relative:<eps> | mixed:<eps_a>,<eps_r>, got '{s}'");
    let (kind, args) = s.split_once(':').ok_or_else(err)?;
    match kind.trim() {
        "absolute" => parse_numbers(args, 1).map(|v| PrecisionGoal::Absolute { eps: v[0] }),
        "relative" => parse_numbers(args, 1).map(|v| PrecisionGoal::Relative { eps: v[0] }),
        "mixed" => parse_numbers(args, 2).map(|v| PrecisionGoal::Mixed {
            eps_a: v[0],
            eps_r: v[1],
        }),
        _ => None,
    }
    .ok_or_else(err)
}

fn parse_schedule(s: &str) -> Result<ScheduleKind, String> {
    let err = || format!("expected finite:<s> | tailed:<tau>, got '{s}'");
    let (kind, count) = s.split_once(':').ok_or_else(err)?;
    let count: usize = count.trim().parse().map_err(|_| err())?;
    match kind.trim() {
        "finite" => Ok(ScheduleKind::Finite(count)),
        "tailed" => Ok(ScheduleKind::Tailed(count)),
        _ => Err(err()),
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Ci(args) => commands::ci(&args),
        Command::Plan(PlanCommand::Build(args)) => commands::plan_build(&args),
        Command::Plan(PlanCommand::Run(args)) => commands::plan_run(&args),
        Command::Simulate(SimulateCommand::Coverage(args)) => commands::simulate_coverage(&args),
        Command::Simulate(SimulateCommand::Plan(args)) => commands::simulate_plan(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    }
}
