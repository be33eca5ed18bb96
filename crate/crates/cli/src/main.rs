//! `preattr`: ingest, clean, featurize, train, evaluate and attribute.

mod commands;
mod config;
mod dataset;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "preattr", version, about = "Sentence pre-attribution and quote attribution")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for splits, forests and synthetic data.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Treat recoverable warnings as errors (exit status 1).
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Clone, Debug)]
pub struct DatasetArgs {
    /// hagrid, hagrid-clean, webglm-qa, synthetic, or a dataset file.
    #[arg(long)]
    dataset: String,
    /// Record layout of the dataset file.
    #[arg(long, value_parser = parse_schema)]
    schema: Option<preattr::Schema>,
}

fn parse_schema(s: &str) -> Result<preattr::Schema, String> {
    s.parse::<preattr::Schema>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Load a dataset and write its sentences as a normalized corpus.
    Ingest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DatasetArgs,
    },
    /// Strip citation markers, apply cleaned labels and merge duplicates.
    Clean {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DatasetArgs,
        /// Cleaned-label sidecar (JSON lines of sample_id, sentence_id, label).
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Write the 24 sentence features as CSV.
    Features {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DatasetArgs,
    },
    /// Fit the pre-attribution forest on a whole dataset.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DatasetArgs,
    },
    /// Run repeated pre-attribution and attribution experiments.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DatasetArgs,
        /// Number of paired runs.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_enum)]
        experiments: Option<config::Experiments>,
        /// Classes used to route attribution.
        #[arg(long, value_enum)]
        class_source: Option<config::ClassSourceSetting>,
    },
    /// Attribute each sentence of an answer to quotes of a document.
    Attribute {
        #[command(flatten)]
        common: Common,
        /// Plain-text answer.
        #[arg(long)]
        answer: PathBuf,
        /// Plain-text source document.
        #[arg(long)]
        document: PathBuf,
        /// Model file written by `train`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Ingest { common, data } => commands::ingest(&common, &data),
        Command::Clean { common, data, labels } => commands::clean(&common, &data, labels),
        Command::Features { common, data } => commands::features(&common, &data),
        Command::Train { common, data } => commands::train(&common, &data),
        Command::Evaluate {
            common,
            data,
            runs,
            experiments,
            class_source,
        } => commands::evaluate(&common, &data, runs, experiments, class_source),
        Command::Attribute {
            common,
            answer,
            document,
            model,
        } => commands::attribute(&common, &answer, &document, model),
    };
    match result {
        Ok(outcome) => {
            if outcome.failures > 0 {
                eprintln!("{} item(s) failed; see the outputs for details", outcome.failures);
                ExitCode::from(1)
            } else if outcome.strict && outcome.warnings > 0 {
                eprintln!("{} warning(s) with --strict", outcome.warnings);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
