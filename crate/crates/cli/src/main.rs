use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod meta;
mod settings;

/// Command-line front end for argument component identification.
#[derive(Parser, Debug)]
#[command(name = "argmine", version, about, propagate_version = true)]
pub struct Cli {
    /// Configuration file with `key = value` lines and optional
    /// per-subcommand sections; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parallel loops (0 = all processors, 1 = sequential)
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a corpus against the schema and the document invariants
    Validate(ValidateArgs),
    /// Corpus size, length and sentence class statistics
    Stats(StatsArgs),
    /// Build gold annotations by majority vote over the annotators
    Gold(GoldArgs),
    /// Inter-annotator agreement measures
    Agreement(AgreementArgs),
    /// Train the sentence labeler on all gold documents
    Train(TrainArgs),
    /// Label a corpus with a trained model
    Predict(PredictArgs),
    /// Score a prediction dump against its gold labels
    Eval(EvalArgs),
    /// Run a cross-validation scenario
    Xval(XvalArgs),
    /// Persuasiveness agreement and document classifier
    Persuasive(PersuasiveArgs),
    /// Render metric tables and side-by-side documents
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
pub struct FeatureArgs {
    /// Feature sets as digit strings, e.g. `01234`; xval accepts a
    /// comma-separated list
    #[arg(long)]
    pub features: Option<String>,

    /// Context window C in sentences
    #[arg(long)]
    pub window: Option<usize>,

    /// Perceptron epochs
    #[arg(long)]
    pub epochs: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Word vectors in word2vec text format
    #[arg(long)]
    pub embeddings: Option<PathBuf>,

    /// Precomputed linguistic layers (JSON sidecar)
    #[arg(long)]
    pub layers: Option<PathBuf>,

    /// Unlabeled texts (one document per line) to fit the topic model on
    /// instead of the training folds
    #[arg(long)]
    pub lda_raw: Option<PathBuf>,

    /// Minimum training count of an n-gram feature
    #[arg(long)]
    pub min_count: Option<usize>,

    #[arg(long)]
    pub lda_topics: Option<usize>,

    #[arg(long)]
    pub lda_iterations: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// `text` or `json`
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GoldArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Corpus file to write with the gold annotations filled in
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AgreementArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// alpha-u, confusion, correlation or fleiss
    #[arg(long)]
    pub metric: Option<String>,
    /// A component type or `logos` for all five
    #[arg(long)]
    pub category: Option<String>,
    #[arg(long = "n-perm")]
    pub n_perm: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated annotator ids (default: all found in the corpus)
    #[arg(long)]
    pub annotators: Option<String>,
    #[arg(long)]
    pub register: Option<String>,
    #[arg(long)]
    pub topic: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureArgs,
    /// Model file to write
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub layers: Option<PathBuf>,
    /// Token TSV to write (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Token TSV written by `predict`
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// A second dump to compare with the paired exact test
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long = "boundary-window")]
    pub boundary_window: Option<usize>,
    /// json, md or html
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct XvalArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub features: FeatureArgs,
    #[arg(long)]
    pub folds: Option<usize>,
    /// all, in-domain or cross-domain
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long = "boundary-window")]
    pub boundary_window: Option<usize>,
    /// Also evaluate the all-O baseline and the gold sentence oracle
    #[arg(long)]
    pub baselines: bool,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rendered report format next to the JSON metrics: json, md or html
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug)]
pub struct PersuasiveArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub min_count: Option<usize>,
    /// Also train on all labeled documents and save the classifier here
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Metrics JSON written by `xval` (repeatable)
    #[arg(long)]
    pub results: Vec<PathBuf>,
    /// Token TSV for the side-by-side part
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long = "boundary-window")]
    pub boundary_window: Option<usize>,
    /// json, md or html
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing arguments; exit code 2.
    Usage(String),
    /// The command ran and failed; exit code 1.
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<argmine::Error> for CliError {
    fn from(e: argmine::Error) -> Self {
        CliError::Failure(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
