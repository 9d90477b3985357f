//! `plscq`: design, evaluate and apply piecewise linear companding
//! quantizers for the unit Gaussian source.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

const AFTER_HELP: &str = "\
Exit status:
  0  success, every requested artifact written
  1  invalid arguments or design parameters, wrong codebook format_version,
     empty input
  2  I/O failure, malformed or inconsistent codebook/sample files

Artifacts are written to a temporary sibling and renamed into place, so a
failed command never leaves a partial file behind.";

#[derive(Debug, Parser)]
#[command(
    name = "plscq",
    version,
    about = "Piecewise linear scalar companding quantizer laboratory (unit Gaussian source)",
    after_help = AFTER_HELP,
    propagate_version = true
)]
pub struct Cli {
    /// Decimals for dB values in human-readable output; thresholds get two
    /// more. Machine-readable output is always full precision.
    #[arg(long, global = true, default_value_t = 2, value_name = "DIGITS")]
    pub precision: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a codebook and write it as JSON.
    ///
    /// The document holds format_version, N, L, x_max, cells_per_segment,
    /// cell_thresholds (positive side, 0 first), reproduction_levels
    /// (positive side, overload centroid last) and overload_level.
    /// A one-line summary goes to stdout.
    Design(DesignArgs),

    /// Evaluate a codebook: distortion report(s) and optional Monte Carlo.
    ///
    /// stdout receives one JSON object
    /// {"N","L","x_max","reports":[{granular,overload,total,sqnr_db,method}],
    /// "monte_carlo":{seed,count,signal_power,noise_power,sqnr_db}|null};
    /// the human-readable summary goes to stderr.
    Eval(EvalArgs),

    /// SQNR against the number of segments, plus the compander baseline.
    ///
    /// Writes CSV with header "L,variant,x_max,Dg,Do,D,sqnr_db,method".
    /// Each L yields a FormulaThreshold row (closed-form x_max) and an
    /// OptimizedThreshold row; the OptimalCompander baseline row has an
    /// empty L. A summary table goes to stdout.
    Sweep(SweepArgs),

    /// Tabulate the optimal and piecewise linear compressors.
    ///
    /// Writes CSV "x,c_optimal,c_piecewise" on P uniformly spaced points of
    /// [-x_max, x_max], endpoints included.
    CompressCurve(CurveArgs),

    /// Encode a sample file into 16-bit level indices.
    ///
    /// Prints {"count","signal_power","noise_power","sqnr_db"} as JSON.
    Quantize(QuantizeArgs),

    /// Decode an index file back into reproduction values.
    Decode(DecodeArgs),

    /// Write seeded unit Gaussian samples (ChaCha20 + Box-Muller).
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// High-rate granular formula plus asymptotic overload term.
    Highrate,
    /// Exact per-cell integrals of the squared error.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Highrate,
    Exact,
    Both,
}

#[derive(Debug, Args)]
#[group(id = "support", required = true, multiple = false)]
pub struct SupportChoice {
    /// Use this support threshold.
    #[arg(long, value_name = "REAL", group = "support")]
    pub xmax: Option<f64>,

    /// Use the closed-form threshold for N.
    #[arg(long, group = "support")]
    pub xmax_formula: bool,

    /// Search [1, 8] for the SQNR-maximizing threshold.
    #[arg(long, group = "support")]
    pub xmax_optimize: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Number of quantization levels N (even, 4..=65536).
    #[arg(long, default_value_t = 128, value_name = "N")]
    pub levels: u32,

    /// Segments per side L, with (N-2)/2 >= L.
    #[arg(long, value_name = "L")]
    pub segments: u32,

    #[command(flatten)]
    pub support: SupportChoice,

    /// Objective used by --xmax-optimize.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Highrate)]
    pub objective: ObjectiveArg,

    /// Codebook JSON destination.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Codebook JSON written by `design`.
    #[arg(long, value_name = "PATH")]
    pub codebook: PathBuf,

    /// Distortion model(s) to report.
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,

    /// Also measure SQNR on this many seeded Gaussian samples.
    #[arg(long, value_name = "SAMPLES")]
    pub mc: Option<u64>,

    /// Seed for --mc.
    #[arg(long, default_value_t = 42, value_name = "S")]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Number of quantization levels N.
    #[arg(long, default_value_t = 128, value_name = "N")]
    pub levels: u32,

    /// Comma-separated segment counts.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,4,8",
        value_name = "CSV"
    )]
    pub segments_list: Vec<u32>,

    /// Objective for both evaluation and threshold optimization.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Highrate)]
    pub objective: ObjectiveArg,

    /// Compander baseline support: `unbounded` (whole real line, no
    /// overload), `formula` (closed-form x_max plus overload term) or a
    /// numeric x_max.
    #[arg(long, default_value = "unbounded", value_name = "SUPPORT")]
    pub baseline: String,

    /// Append a Uniform row (single segment at its optimum).
    #[arg(long)]
    pub uniform: bool,

    /// CSV destination.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,

    /// Optional JSON mirror of the CSV.
    #[arg(long, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Segments per side L.
    #[arg(long, value_name = "L")]
    pub segments: u32,

    /// Support threshold.
    #[arg(long, value_name = "REAL")]
    pub xmax: f64,

    /// Grid points, at least 2.
    #[arg(long, default_value_t = 201, value_name = "P")]
    pub points: usize,

    /// CSV destination.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    #[arg(long, value_name = "PATH")]
    pub codebook: PathBuf,

    /// Samples: little-endian f64, or one decimal per line with --text.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Index file: little-endian u16 per sample.
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,

    /// Read text samples instead of binary.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, value_name = "PATH")]
    pub codebook: PathBuf,

    /// Index file written by `quantize`.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Reproduced samples destination.
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,

    /// Write text samples instead of binary.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of samples.
    #[arg(long, value_name = "COUNT")]
    pub count: u64,

    #[arg(long, default_value_t = 42, value_name = "S")]
    pub seed: u64,

    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,

    /// Write text samples instead of binary.
    #[arg(long)]
    pub text: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_runtime() { 2 } else { 1 })
        }
    }
}
