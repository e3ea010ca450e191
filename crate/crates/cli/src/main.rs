//! `vw`: localization runs, universal-series extraction and verification
//! from the command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid input or a
//! failed computation.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Compute(String),
    Io(String),
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid configuration: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Mismatch(m) => write!(f, "verification mismatch: {m}"),
        }
    }
}

macro_rules! compute_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        })*
    };
}

compute_error!(
    vw_core::LocalizationError,
    vw_core::UniversalError,
    vw_core::OracleError,
    vw_core::cache::CacheError,
    vw_core::toric::ToricError
);

#[derive(Parser)]
#[command(name = "vw", version, about = "Monopole-branch contributions to refined Vafa-Witten invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sum Q_n over |n| <= nmax for one surface and bundle tuple.
    ComputeQ(ComputeQArgs),
    /// Extract the universal series of a rank from the toric basis.
    Extract(ExtractArgs),
    /// Assemble A, B and C_ij from extracted universal series.
    Assemble(AssembleArgs),
    /// Compare extracted series with closed-form predictions.
    Verify(VerifyArgs),
    /// Drop corrupt or old cache entries.
    CacheGc(CacheGcArgs),
}

#[derive(Args, Clone, Default)]
pub struct Common {
    /// key = value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// 1 runs serially; defaults to the available parallelism
    #[arg(long)]
    pub workers: Option<usize>,
    /// cache root; defaults to $VW_CACHE_DIR
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSel {
    Unrefined,
    Refined,
    Both,
}

impl std::str::FromStr for ModeSel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <ModeSel as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Clone)]
pub struct ComputeQArgs {
    #[command(flatten)]
    pub common: Common,
    /// p2 or p1xp1
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// `trivial`, or r-1 classes separated by `;`, each `K`, `2K`, `0` or
    /// comma-separated Picard coordinates
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeSel>,
}

#[derive(Args, Clone)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeSel>,
}

#[derive(Args, Clone)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub extract: ExtractArgs,
    /// output of `extract`; computed afresh when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Conjecture {
    GkRank2,
    GkRank3,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct Check {
    /// closed forms for A, B, C_ij
    #[arg(long, value_enum)]
    pub conjecture: Option<Conjecture>,
    /// K3 closed form against its product form
    #[arg(long)]
    pub k3: bool,
    /// Z for c1 = K on surfaces whose canonical curve generates Pic
    #[arg(long)]
    pub theorem_bprime: bool,
}

#[derive(Args, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub check: Check,
    #[arg(long)]
    pub rank: Option<usize>,
    /// number of terms compared (power of q for --k3)
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeSel>,
    /// output of `extract`; computed afresh when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct CacheGcArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// also drop entries older than this many days
    #[arg(long)]
    pub max_age_days: Option<f64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ComputeQ(a) => commands::compute_q(&a),
        Command::Extract(a) => commands::extract(&a),
        Command::Assemble(a) => commands::assemble(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::CacheGc(a) => commands::cache_gc(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
