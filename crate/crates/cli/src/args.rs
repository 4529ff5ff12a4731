use std::path::PathBuf;

use cider_eval::{Metric, MetricConfig, TokenizerOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cider-eval", version, about = "Caption evaluation: CIDEr-R, CIDEr-D, BLEU-4 and ROUGE-L")]
pub struct Cli {
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, env = "CIDER_EVAL_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub parallelism: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a batch of candidates against their references.
    Score(ScoreArgs),
    /// Measure agreement of metrics with human votes on candidate pairs.
    TripletEval(TripletArgs),
    /// Evaluate CIDEr-R over a grid of k_r values.
    SweepKr(SweepArgs),
    /// Dataset size, vocabulary and sentence-length statistics.
    Stats(StatsArgs),
    /// Build and save a document-frequency table from a references file.
    BuildDf(BuildDfArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Weight of the repetition penalty in CIDEr-R.
    #[arg(long = "kr", default_value_t = 0.8)]
    pub k_r: f64,

    /// Standard deviation of the CIDEr-D length Gaussian.
    #[arg(long, default_value_t = 6.0)]
    pub sigma: f64,

    /// Largest n-gram arity.
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,

    /// Multiplier from raw to reported scores.
    #[arg(long, default_value_t = 100.0)]
    pub scale: f64,

    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
}

impl MetricArgs {
    pub fn config(&self) -> MetricConfig {
        MetricConfig {
            max_n: self.max_n,
            sigma: self.sigma,
            k_r: self.k_r,
            report_scale: self.scale,
            tokenizer: self.tokenizer.options(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TokenizerArgs {
    /// Treat input captions as already tokenized: split on whitespace only.
    #[arg(long)]
    pub pretokenized: bool,
}

impl TokenizerArgs {
    pub fn options(&self) -> TokenizerOptions {
        if self.pretokenized {
            TokenizerOptions { lowercase: false, strip_punctuation: false, unicode_normalize: false }
        } else {
            TokenizerOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Comma-separated metrics.
    #[arg(long, value_delimiter = ',', default_value = "cider-r,cider-d,bleu-4,rouge-l", value_parser = parse_metric)]
    pub metrics: Vec<Metric>,

    /// Batch JSONL: {"image_id", "candidate", "references"} per line.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    /// Build document frequencies from this references JSONL instead of the batch.
    #[arg(long, value_name = "PATH")]
    pub refs_file: Option<PathBuf>,

    /// Load document frequencies from a table written by `build-df`.
    #[arg(long, value_name = "PATH")]
    pub df: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Include per-reference penalties for the CIDEr family.
    #[arg(long)]
    pub penalty_breakdown: bool,

    #[command(flatten)]
    pub metric: MetricArgs,
}

#[derive(Debug, Args)]
pub struct TripletArgs {
    #[arg(long, value_delimiter = ',', default_value = "cider-r,cider-d,bleu-4,rouge-l", value_parser = parse_metric)]
    pub metrics: Vec<Metric>,

    /// Triplet JSONL: {"references", "b", "c", "vote"} per line.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    /// References sampled per triplet; a comma-separated list sweeps several counts.
    #[arg(long, value_delimiter = ',', default_value = "5", value_parser = clap::value_parser!(u32).range(1..))]
    pub refs: Vec<u32>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub metric: MetricArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    /// Mean CIDEr-R over a scoring batch.
    CorpusMean,
    /// CIDEr-R triplet accuracy.
    Accuracy,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Batch JSONL for `corpus-mean`, triplet JSONL for `accuracy`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = Objective::CorpusMean)]
    pub objective: Objective,

    /// Explicit k_r values; defaults to 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    pub grid: Vec<f64>,

    /// Draw this many k_r values uniformly from [0, 1] using --seed.
    #[arg(long, value_name = "COUNT")]
    pub random: Option<usize>,

    /// References per triplet for the `accuracy` objective.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub refs: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_name = "PATH")]
    pub refs_file: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub df: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(flatten)]
    pub metric: MetricArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Captions: `.jsonl` batch or reference records, COCO `.json`, or one caption per line.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
}

#[derive(Debug, Args)]
pub struct BuildDfArgs {
    /// References JSONL: {"references": [...]} per image.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,

    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,

    #[arg(long, default_value_t = 4)]
    pub max_n: usize,

    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|_| format!("unknown metric `{s}` (expected one of cider-r, cider-d, bleu-4, rouge-l)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_match_library_config() {
        let cli = Cli::try_parse_from(["cider-eval", "score", "--in", "b.jsonl"]).unwrap();
        let Command::Score(args) = cli.command else { panic!("expected score") };
        assert_eq!(args.metric.config(), MetricConfig::default());
        assert_eq!(args.metrics.len(), 4);
    }

    #[test]
    fn metric_lists_accept_aliases() {
        let cli = Cli::try_parse_from(["cider-eval", "triplet-eval", "--metrics", "CIDEr-R,bleu4", "--in", "t.jsonl"])
            .unwrap();
        let Command::TripletEval(args) = cli.command else { panic!("expected triplet-eval") };
        assert_eq!(args.metrics, vec![Metric::CiderR, Metric::Bleu4]);
    }
}
