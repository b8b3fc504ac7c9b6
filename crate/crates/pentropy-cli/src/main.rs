//! `pentropy`: persistent entropy of sampled signals from the command line.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{CliError, Kind};

const AFTER_HELP: &str = "\
Errors are written to stderr as one JSON object per line:
  {\"error\": ..., \"exit_code\": ..., \"message\": ..., \"path\": ...}

Exit codes:
  0  success
  2  usage error (bad flags, unknown command)
  3  I/O error (unreadable input, unwritable output)
  4  invalid input (parse errors, bad samples, bad labels)
  5  computation or invariant failure (including a violated stability bound)
  6  oracle mismatch under --oracle-check";

#[derive(Debug, Parser)]
#[command(name = "pentropy", version, about = "Persistent entropy of sampled signals", after_help = AFTER_HELP)]
pub struct Cli {
    /// Worker threads for batch work; 0 uses one per core
    #[arg(long, global = true, env = "PENTROPY_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistent entropy of each input signal, as JSON
    Entropy(SignalArgs),
    /// Zero-dimensional barcode of each input signal, as JSON
    Barcode {
        #[command(flatten)]
        signals: SignalArgs,
        /// Emit the filtered complex next to the barcode
        #[arg(long)]
        dump_filtration: bool,
    },
    /// Check diagram and entropy stability for two signals on one grid
    Compare {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_enum)]
        format: Option<InputFormat>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ROC curve as `threshold,fpr,tpr` CSV
    Roc(ScoreArgs),
    /// Stratified k-fold cross-validation of the entropy threshold
    Cv {
        #[command(flatten)]
        scores: ScoreArgs,
        /// Number of folds
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Seed for the fold assignment
        #[arg(long, default_value_t = 2016)]
        seed: u64,
    },
    /// Write a synthetic two-class corpus with a manifest
    Synth {
        /// Directory to create
        dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        good: Option<usize>,
        #[arg(long)]
        faulty: Option<usize>,
        /// Samples per signal
        #[arg(long)]
        length: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct SignalArgs {
    /// Signal files, or directories of `.csv` / `.json` signals
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Recompute each barcode by boundary-matrix reduction (inputs up to
    /// 10000 simplices) and fail on any difference
    #[arg(long)]
    pub oracle_check: bool,
    /// Output file; in batch mode a directory receiving one file per signal
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// A scores CSV (`id,score,label`) or a corpus directory with manifest.json
    pub input: PathBuf,
    /// Score corpus signals by normalized entropy (default)
    #[arg(long, overrides_with = "raw")]
    pub normalized: bool,
    /// Score corpus signals by raw entropy
    #[arg(long, overrides_with = "normalized")]
    pub raw: bool,
    /// Format of corpus signal files; guessed from the extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long)]
    pub oracle_check: bool,
    /// Also write the scores computed from a corpus as CSV
    #[arg(long)]
    pub write_scores: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Csv,
    Json,
}

impl From<InputFormat> for pentropy::Format {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Csv => pentropy::Format::Csv,
            InputFormat::Json => pentropy::Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!(
                "{}",
                CliError::new(Kind::Usage, message.trim_end()).to_json()
            );
            return ExitCode::from(Kind::Usage.exit_code());
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code())
        }
    }
}
