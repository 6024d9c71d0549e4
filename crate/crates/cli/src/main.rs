//! `realword` command-line driver.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Beam;

#[derive(Parser)]
#[command(name = "realword", version, about = "Real-word spelling error detection and correction")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment and tokenize raw text files into one sentence per line.
    Prepare(PrepareArgs),
    /// Build the vocabulary, trigram model and confusion index.
    Train(TrainArgs),
    /// Type and hapax statistics of a vocabulary or corpus.
    Stats(StatsArgs),
    /// Plant seeded real-word errors in a corpus.
    Corrupt(CorruptArgs),
    /// How often the model prefers each original sentence to its corrupted copy.
    Botd(BotdArgs),
    /// Decode a corpus with the noisy-channel corrector.
    Correct(CorrectArgs),
    /// Score a corrected corpus against the original text and error records.
    Evaluate(EvaluateArgs),
    /// Correct and evaluate over a grid of beam widths and beta values.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct PrepareArgs {
    /// Input files or directories (every regular file inside, sorted by name).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output corpus file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extra abbreviations, one per line, without the final period.
    #[arg(long)]
    pub abbreviations: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Tokenized training corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output directory for vocab.tsv, model.arpa and confusion.tsv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct StatsArgs {
    /// Vocabulary TSV written by `train`.
    #[arg(long, conflicts_with = "corpus")]
    pub vocab: Option<PathBuf>,
    /// Tokenized corpus to count directly.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Args)]
pub struct CorruptArgs {
    /// Clean tokenized corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Each token is considered with chance 1/RATE.
    #[arg(long)]
    pub rate: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for corrupted.txt, records.tsv and census.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BotdArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Original (clean) corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CorrectArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Observed corpus to correct.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// States kept per position, or "inf".
    #[arg(long)]
    pub beam: Option<Beam>,
    /// Output directory for corrected.txt and changes.tsv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Original (clean) corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub corrected: Option<PathBuf>,
    /// Labels recorded in the report.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub beam: Option<Beam>,
    #[arg(long)]
    pub rate: Option<u64>,
    /// Where to write the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Original (clean) corpus.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Beta grid, comma separated.
    #[arg(long = "beta", value_delimiter = ',')]
    pub betas: Vec<f64>,
    /// Beam grid, comma separated ("inf" allowed).
    #[arg(long = "beam", value_delimiter = ',')]
    pub beams: Vec<Beam>,
    /// Rate label for the report rows.
    #[arg(long)]
    pub rate: Option<u64>,
    /// Output directory for sweep.json and sweep.tsv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (stage, result) = commands::run(cli.config.as_deref(), cli.command);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("realword {stage}: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
