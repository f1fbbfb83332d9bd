use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsync_core::cipher::Codec;
use fracsync_core::coupling::{GainVariant, ScenarioName};
use fracsync_core::solver::DEFAULT_DIVERGENCE_THRESHOLD;
use fracsync_core::analysis::{DEFAULT_SYNC_TOLERANCE, DEFAULT_TAIL_FRACTION};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "fracsync",
    version,
    about = "Fractional-order chaotic systems: simulation, synchronization and a trajectory-keyed cipher"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a built-in system and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Run a drive/response pair under a controller and classify the error.
    Couple(CoupleArgs),
    /// Matignon stability verdicts for diagonal closed loops.
    Stability(StabilityArgs),
    /// Encrypt or decrypt with the additive stream cipher.
    #[command(subcommand)]
    Cipher(CipherCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    T,
    Rossler,
}

impl SystemArg {
    pub fn name(self) -> &'static str {
        match self {
            SystemArg::T => "t",
            SystemArg::Rossler => "rossler",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    TtSync,
    TtAnti,
    RtSync,
    RtAnti,
}

impl ScenarioArg {
    pub fn to_core(self) -> ScenarioName {
        let name = match self {
            ScenarioArg::TtSync => "tt-sync",
            ScenarioArg::TtAnti => "tt-anti",
            ScenarioArg::RtSync => "rt-sync",
            ScenarioArg::RtAnti => "rt-anti",
        };
        name.parse().expect("every scenario argument names a scenario")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainsArg {
    Paper,
    Corrected,
    Stabilized,
}

impl GainsArg {
    pub fn to_core(self, k: [f64; 3]) -> GainVariant {
        match self {
            GainsArg::Paper => GainVariant::Paper,
            GainsArg::Corrected => GainVariant::Corrected,
            GainsArg::Stabilized => GainVariant::Stabilized(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodecArg {
    Paper36,
    Base36,
    Ascii128,
}

impl CodecArg {
    pub fn to_core(self) -> Codec {
        match self {
            CodecArg::Paper36 => Codec::Paper36,
            CodecArg::Base36 => Codec::Base36,
            CodecArg::Ascii128 => Codec::Ascii128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Text,
    Json,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value for {name}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Step size.
    #[arg(long, default_value_t = 0.005)]
    pub h: f64,
    /// Integration horizon.
    #[arg(long = "t-end", default_value_t = 50.0)]
    pub t_end: f64,
    /// Corrector passes per step.
    #[arg(long, default_value_t = 1)]
    pub corrector_sweeps: usize,
    /// Keep only this many past steps in the memory sums.
    #[arg(long)]
    pub memory_window: Option<usize>,
    /// State max-norm at which a run is stopped as diverged.
    #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
    pub divergence_threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub system: SystemArg,
    /// Derivative orders, one per component.
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.5, 0.6])]
    pub alpha: Vec<f64>,
    /// Initial state.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.01, 0.01, 0.01])]
    pub x0: Vec<f64>,
    /// Parameter override, e.g. `--param c1=28`. Repeatable.
    #[arg(long, value_parser = parse_param)]
    pub param: Vec<(String, f64)>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output path; `-` is standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoupleArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value_t = GainsArg::Stabilized)]
    pub gains: GainsArg,
    /// Closed-loop decay rates for `--gains stabilized`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    pub k: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.5, 0.6])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.01, 0.01, 0.01])]
    pub drive_x0: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.5, 0.5, 0.5])]
    pub response_x0: Vec<f64>,
    /// Parameter override for either system, e.g. `--param c2=6`. Repeatable.
    #[arg(long, value_parser = parse_param)]
    pub param: Vec<(String, f64)>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Tail sup-norm below which the error counts as converged.
    #[arg(long, default_value_t = DEFAULT_SYNC_TOLERANCE)]
    pub tolerance: f64,
    /// Fraction of the run used as the tail window.
    #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
    pub tail: f64,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    /// Real eigenvalues of a diagonal closed loop.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "scenario")]
    pub lambda: Option<Vec<f64>>,
    /// Orders; required with `--lambda`, defaults to 0.9,0.5,0.6 with `--scenario`.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Audit the closed loop of a coupling scenario instead.
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    #[arg(long, value_enum, default_value_t = GainsArg::Paper)]
    pub gains: GainsArg,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0])]
    pub k: Vec<f64>,
    #[arg(long, value_parser = parse_param)]
    pub param: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CipherCommand {
    /// Print the ciphertext as comma-separated codes.
    Encrypt(EncryptArgs),
    /// Print the recovered plaintext.
    Decrypt(DecryptArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct KeyArgs {
    /// File with one integer key per line.
    #[arg(long)]
    pub keys_file: Option<PathBuf>,
    /// Seed of the pseudo-random key stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `path,column,t0-index`: keys from a CSV trajectory column (name or
    /// zero-based position), using the samples after row `t0-index`.
    #[arg(long)]
    pub keystream_from: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CipherOptions {
    #[arg(long, value_enum, default_value_t = CodecArg::Paper36)]
    pub codec: CodecArg,
    /// Multiplier applied to |z| before flooring trajectory samples into keys.
    #[arg(long, default_value_t = fracsync_core::cipher::DEFAULT_KEY_SCALE)]
    pub scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EncryptArgs {
    #[command(flatten)]
    pub keys: KeyArgs,
    #[command(flatten)]
    pub options: CipherOptions,
    #[arg(long)]
    pub message: String,
}

#[derive(Debug, Clone, Args)]
pub struct DecryptArgs {
    #[command(flatten)]
    pub keys: KeyArgs,
    #[command(flatten)]
    pub options: CipherOptions,
    /// Comma-separated codes.
    #[arg(long, value_delimiter = ',')]
    pub ciphertext: Vec<u64>,
}
