use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gfr_core::{Method, Scenario};

#[derive(Debug, Parser)]
#[command(name = "gfr", version, about = "Forward-regression variable screening")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Screen the predictors of a CSV dataset.
    Screen(ScreenArgs),
    /// Run a Monte Carlo scenario on a built-in design.
    Simulate(SimulateArgs),
    /// Restricted eigenvalues, correlations and sufficient conditions of a design.
    Diagnose(DiagnoseArgs),
    /// Write one replication of a built-in design as CSV.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sis,
    Isis,
    Fr,
    Gfr,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sis => Method::Sis,
            MethodArg::Isis => Method::Isis,
            MethodArg::Fr => Method::Fr,
            MethodArg::Gfr => Method::Gfr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    I,
    Ii,
    Iii,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::I => Scenario::I,
            ScenarioArg::Ii => Scenario::II,
            ScenarioArg::Iii => Scenario::III,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SelectArg {
    #[default]
    None,
    Bic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
    Csv,
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Gfr)]
    pub method: MethodArg,
    /// Columns added per step (fr requires 1).
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// SIS model size (default floor(n / ln n)).
    #[arg(long)]
    pub d: Option<usize>,
    /// ISIS stages (default floor(ln n - 1)).
    #[arg(long)]
    pub isis_steps: Option<usize>,
    /// Variables per ISIS stage (default floor(n / ln n)).
    #[arg(long)]
    pub isis_per_step: Option<usize>,
    /// Step cap for fr/gfr (default floor(n / J)).
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub select: SelectArg,
    /// Center and scale every column to mean 0, variance 1 (divisor n).
    #[arg(long)]
    pub standardize: bool,
    /// Test fraction for prediction error; enables the split protocol.
    #[arg(long)]
    pub holdout: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub splits: usize,
    /// Seed for the train/test splits (default: --seed).
    #[arg(long)]
    pub split_seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Design number: 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub example: u8,
    #[arg(long, default_value_t = 150)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Population R^2 in (0, 1).
    #[arg(long)]
    pub r2: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Gfr)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Response column, excluded from the design; required for the coverage check.
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long)]
    pub standardize: bool,
    /// Report phi(s), Phi(s) and delta_s for s = 1..=S.
    #[arg(long, default_value_t = 2)]
    pub s: usize,
    /// Restricted correlation sizes as `s1,s2`; repeatable.
    #[arg(long = "theta", value_parser = parse_pair)]
    pub theta: Vec<(usize, usize)>,
    /// True model size for the condition checks.
    #[arg(long)]
    pub p0: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Step multiplier for the coverage check (needs --p0, --beta-min, --response).
    #[arg(long)]
    pub k0: Option<usize>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    /// Slack for the recovery check (needs --p0).
    #[arg(long)]
    pub eta: Option<f64>,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub example: u8,
    #[arg(long, default_value_t = 150)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub r2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replication index whose random stream is used.
    #[arg(long, default_value_t = 0)]
    pub replication: u64,
    /// Name of the response column.
    #[arg(long, default_value = "y")]
    pub response: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `s1,s2`, got `{s}`"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}
