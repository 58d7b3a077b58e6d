mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chairman::{Error, NumericMode};

#[derive(Parser, Debug)]
#[command(name = "chairman", version, about = "Low-discrepancy rounding, exact oracles and flow-time scheduling")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,

    /// f64 arithmetic with tolerance-based comparisons.
    #[arg(long, global = true)]
    pub float: bool,

    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Slack on bound checks in float mode.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Oracle node cap.
    #[arg(long, global = true)]
    pub node_limit: Option<u64>,

    /// Oracle wall-clock cap in seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
}

impl RunConfig {
    pub fn mode(&self) -> NumericMode {
        if self.float {
            NumericMode::Float
        } else {
            NumericMode::Exact
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Round a fractional assignment and report its discrepancy.
    Round(RoundArgs),
    /// Minimum discrepancy by exact search.
    Oracle(OracleArgs),
    /// Emit a named or random instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Flow-time scheduling with machine closing times.
    #[command(subcommand)]
    Schedule(ScheduleCommand),
    /// Path network of an assignment.
    #[command(subcommand)]
    Flow(FlowCommand),
    /// Re-run a headline claim and report pass or fail.
    Repro(ReproArgs),
}

#[derive(Args, Debug)]
pub struct RoundArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `{"a": [...]}` with one-based first usable column per row.
    #[arg(long, conflicts_with = "closing_times")]
    pub open_times: Option<PathBuf>,
    /// Scheduling instance whose machines and releases restrict the rounding.
    #[arg(long)]
    pub closing_times: Option<PathBuf>,
    #[arg(long, default_value = "earliest-deadline")]
    pub rounder: String,
    /// Where to write `{"s": [...]}`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveArg {
    Prefix,
    Interval,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Prefix)]
    pub objective: ObjectiveArg,
    #[arg(long)]
    pub input: PathBuf,
    /// Only assign columns to rows where x is positive.
    #[arg(long)]
    pub support: bool,
    /// Decide whether some assignment has objective below this value.
    #[arg(long)]
    pub threshold: Option<String>,
    /// Decide `<= threshold` instead of `< threshold`.
    #[arg(long, requires = "threshold")]
    pub inclusive: bool,
    #[arg(long, default_value = "branch-and-bound")]
    pub method: String,
    #[arg(long)]
    pub no_memo: bool,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    Caplb {
        #[arg(long)]
        m: usize,
    },
    Carlb {
        #[arg(long)]
        delta: String,
    },
    Intlb,
    /// Closing-time staircase on which FIFO is far from optimal.
    Fifo {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1e-4")]
        delta: String,
    },
    Random(RandomArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightsArg {
    Uniform,
    Ones,
    TwoValued,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = WeightsArg::Uniform)]
    pub weights: WeightsArg,
    /// Small weight for `--weights two-valued`.
    #[arg(long, default_value_t = 0.3)]
    pub low: f64,
    /// Probability that an entry may be positive.
    #[arg(long)]
    pub density: Option<f64>,
    /// Emit a closing-time scheduling instance instead.
    #[arg(long)]
    pub schedule: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMethodArg {
    /// Separation of violated interval rows.
    Cuts,
    /// Every interval row up front.
    Full,
}

#[derive(Args, Debug)]
pub struct ScheduleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = LpMethodArg::Cuts)]
    pub lp_method: LpMethodArg,
}

#[derive(Subcommand, Debug)]
pub enum ScheduleCommand {
    SolveLp(ScheduleArgs),
    Approx(ScheduleArgs),
    Fifo(ScheduleArgs),
    /// LP value, FIFO and approx side by side.
    Compare(ScheduleArgs),
}

#[derive(Subcommand, Debug)]
pub enum FlowCommand {
    /// Print the network with the fractional flow.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        carpool: bool,
    },
    /// Compare the fractional flow with the unsplittable flow of an assignment.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// `{"s": [...]}`; rounded with `--rounder` when absent.
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long, default_value = "earliest-deadline")]
        rounder: String,
        #[arg(long)]
        carpool: bool,
    },
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    /// Claim id or alias.
    #[arg(required_unless_present_any = ["all", "list"])]
    pub claim: Option<String>,
    #[arg(long, conflicts_with = "claim")]
    pub all: bool,
    /// List claim ids and exit.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Add wall-clock times to the report.
    #[arg(long)]
    pub timings: bool,
}

/// What a command produced, before rendering.
pub struct Outcome {
    pub body: render::Body,
    /// A checked bound was violated.
    pub failed: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.run.float && !(cli.run.tolerance > 0.0) {
        eprintln!("error: --tolerance must be positive in float mode");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", render::render(&outcome.body, cli.run.format));
            ExitCode::from(if outcome.failed { 1 } else { 0 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
