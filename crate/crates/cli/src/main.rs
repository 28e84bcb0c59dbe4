mod commands;
mod config;
mod load;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use scriptthread_core::annotation::LineReference;
use serde::Serialize;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20230717;

/// Screenplay conversation disentanglement: parse scripts, predict reply-to
/// links, score threads and run corpus analyses.
#[derive(Debug, Parser, Serialize)]
#[command(name = "scriptthread", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for sampling, initialization and bootstrap resampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for scene-level work (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Report format for evaluate and agreement.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// JSON object of flag values; flags on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineRef {
    First,
    Last,
}

impl From<LineRef> for LineReference {
    fn from(l: LineRef) -> Self {
        match l {
            LineRef::First => LineReference::First,
            LineRef::Last => LineReference::Last,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Movie,
    TvPilot,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Parse screenplay text files into canonical JSONL.
    Parse(ParseArgs),
    /// Train the featurized link scorer on annotated scenes.
    Train(TrainArgs),
    /// Predict reply-to links for parsed or annotated scenes.
    Predict(PredictArgs),
    /// Score predicted links against gold annotations.
    Evaluate(EvaluateArgs),
    /// Compare two annotations of the same scenes.
    Agreement(AgreementArgs),
    /// Thread length by era and floor claiming by gender.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ParseArgs {
    /// Screenplay text files or directories of `.txt` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Kind::Movie)]
    pub kind: Kind,
    /// Directory with `train.txt`, `dev.txt`, `test.txt` listing title slugs;
    /// adds per-split totals to the report.
    #[arg(long)]
    pub splits: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Annotation tables (or directories of them) to train on.
    #[arg(long, required = true, num_args = 1..)]
    pub train: Vec<PathBuf>,
    /// Annotation tables used to pick the best epoch.
    #[arg(long, num_args = 1..)]
    pub dev: Vec<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long = "lr", default_value_t = 1e-3)]
    pub learning_rate: f64,
    /// Negative candidates sampled per gold link.
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    /// Weight of the same-thread auxiliary loss (0 disables it).
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Candidate pool size, self included.
    #[arg(long, default_value_t = 6)]
    pub pool_size: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    /// Hidden width of the scoring head; 0 trains a linear scorer.
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    /// Subword vocabulary (one piece per line) for the token-overlap feature.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Also feed the candidate's speaker-history features.
    #[arg(long)]
    pub duplicate_candidate_features: bool,
    #[arg(long, value_enum, default_value_t = LineRef::Last)]
    pub line_reference: LineRef,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("predictor").required(true).args(["model", "baseline"])))]
pub struct PredictArgs {
    /// Canonical JSONL or annotation tables (or directories of them).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Trained model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Link every utterance to the previous one instead of using a model.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long, default_value_t = 6)]
    pub pool_size: usize,
    #[arg(long, value_enum, default_value_t = LineRef::Last)]
    pub line_reference: LineRef,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Gold annotation tables (or directories of them).
    #[arg(long, required = true, num_args = 1..)]
    pub gold: Vec<PathBuf>,
    /// Prediction JSONL files named after their titles (or directories).
    #[arg(long, required = true, num_args = 1..)]
    pub pred: Vec<PathBuf>,
    /// Bootstrap resamples for confidence intervals (0 disables them).
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    /// Skip scenes whose prediction does not cover the gold utterances,
    /// listing them in the manifest, instead of failing.
    #[arg(long)]
    pub skip_invalid: bool,
    #[arg(long, value_enum, default_value_t = LineRef::Last)]
    pub line_reference: LineRef,
}

#[derive(Debug, Args, Serialize)]
pub struct AgreementArgs {
    /// Reference annotation (table or links JSONL).
    #[arg(long)]
    pub a: PathBuf,
    /// Second annotation of the same scenes.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, value_enum, default_value_t = LineRef::Last)]
    pub line_reference: LineRef,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Annotation tables, or canonical JSONL together with `--links`.
    #[arg(long, required = true, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    /// Directory of predicted links, one `<title>.jsonl` per title.
    #[arg(long)]
    pub links: Option<PathBuf>,
    /// Name of the model behind `--links`, stamped into the reports.
    #[arg(long)]
    pub model_name: Option<String>,
    /// CSV with title_slug, year, character, gender.
    #[arg(long)]
    pub metadata: PathBuf,
    #[arg(long, default_value_t = 1980)]
    pub min_year: i32,
    #[arg(long, default_value_t = 5)]
    pub bucket_width: i32,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, value_enum, default_value_t = LineRef::Last)]
    pub line_reference: LineRef,
}

/// A problem with how the tool was invoked (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let args = match config::merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            if let Some(ce) = e.downcast_ref::<clap::Error>() {
                ce.exit();
            }
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let cli = Cli::parse_from(args);
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
