use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use cider_eval::corpus::{load_df, save_df};
use cider_eval::harness::{load_captions, random_grid, read_jsonl, BatchOptions, ReferenceRecord};
use cider_eval::{
    build_df, corpus_stats, score_batch, sweep_kr, tokenize, triplet_accuracy, DfProvenance, DfSource, DfTable,
    EvalBatch, Execution, MetricConfig, SweepObjective, TokenizedCaption, TokenizerOptions, TripletRecord,
};
use serde::Serialize;

use crate::args::{BuildDfArgs, Format, Objective, ScoreArgs, StatsArgs, SweepArgs, TripletArgs};
use crate::Failure;

pub struct Ctx {
    pub execution: Execution,
}

fn config(cfg: MetricConfig) -> Result<MetricConfig, Failure> {
    cfg.validate().map_err(|e| Failure::Usage(e.into()))?;
    Ok(cfg)
}

/// Loads an external DF table when `--df` or `--refs-file` was given.
fn external_df(
    df: Option<&Path>,
    refs_file: Option<&Path>,
    max_n: usize,
    tok: &TokenizerOptions,
) -> Result<Option<DfTable>, Failure> {
    match (df, refs_file) {
        (Some(_), Some(_)) => {
            Err(Failure::Usage(anyhow::anyhow!("conflicting DF flags: use either --df or --refs-file")))
        }
        (Some(path), None) => {
            let table = load_df(path)?;
            if table.max_n() < max_n {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "{} holds n-grams up to {}, but --max-n is {max_n}",
                    path.display(),
                    table.max_n()
                )));
            }
            Ok(Some(table))
        }
        (None, Some(path)) => {
            let table = df_from_refs(path, max_n, tok)?
                .with_provenance(DfProvenance::RefsFile { path: path.display().to_string() });
            Ok(Some(table))
        }
        (None, None) => Ok(None),
    }
}

fn df_from_refs(path: &Path, max_n: usize, tok: &TokenizerOptions) -> Result<DfTable, Failure> {
    let records: Vec<ReferenceRecord> = read_jsonl(path)?;
    let sets: Vec<Vec<TokenizedCaption>> =
        records.iter().map(|r| r.references.iter().map(|c| tokenize(c, tok)).collect()).collect();
    Ok(build_df(&sets, max_n)?)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).context("serializing report").map_err(Failure::Internal)?;
    text.push('\n');
    emit(&text, out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::Input)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .context("writing stdout")
                .map_err(Failure::Input)
        }
    }
}

pub fn score(args: &ScoreArgs, ctx: &Ctx) -> Result<(), Failure> {
    let cfg = config(args.metric.config())?;
    let external = external_df(args.df.as_deref(), args.refs_file.as_deref(), cfg.max_n, &cfg.tokenizer)?;
    let batch = EvalBatch::from_jsonl(&args.input)?;
    let source = external.as_ref().map_or(DfSource::Batch, DfSource::Table);
    let opts = BatchOptions { penalty_breakdown: args.penalty_breakdown, execution: ctx.execution };
    let report = score_batch(&batch, &args.metrics, &cfg, source, &opts)?;
    match args.format {
        Format::Json => emit_json(&report, args.out.as_deref()),
        Format::Csv => emit(&report.to_csv()?, args.out.as_deref()),
    }
}

pub fn triplet_eval(args: &TripletArgs, ctx: &Ctx) -> Result<(), Failure> {
    let cfg = config(args.metric.config())?;
    let triplets: Vec<TripletRecord> = read_jsonl(&args.input)?;
    let mut reports = Vec::with_capacity(args.metrics.len() * args.refs.len());
    for &k in &args.refs {
        for metric in &args.metrics {
            reports.push(triplet_accuracy(&triplets, metric, &cfg, k as usize, args.seed, ctx.execution)?);
        }
    }
    emit_json(&reports, args.out.as_deref())
}

#[derive(Serialize)]
struct SweepReport<'a> {
    toolkit_version: &'a str,
    objective: &'static str,
    seed: u64,
    config: MetricConfig,
    rows: Vec<cider_eval::SweepRow>,
}

pub fn sweep(args: &SweepArgs, ctx: &Ctx) -> Result<(), Failure> {
    let cfg = config(args.metric.config())?;
    let grid = match (args.random, args.grid.is_empty()) {
        (Some(count), _) => random_grid(count, args.seed),
        (None, true) => (0..=10).map(|i| i as f64 / 10.0).collect(),
        (None, false) => args.grid.clone(),
    };
    let rows = match args.objective {
        Objective::CorpusMean => {
            let external = external_df(args.df.as_deref(), args.refs_file.as_deref(), cfg.max_n, &cfg.tokenizer)?;
            let batch = EvalBatch::from_jsonl(&args.input)?;
            let df = external.as_ref().map_or(DfSource::Batch, DfSource::Table);
            sweep_kr(SweepObjective::CorpusMean { batch: &batch, df }, &grid, &cfg, ctx.execution)?
        }
        Objective::Accuracy => {
            if args.df.is_some() || args.refs_file.is_some() {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "--df and --refs-file do not apply to the accuracy objective"
                )));
            }
            let triplets: Vec<TripletRecord> = read_jsonl(&args.input)?;
            let objective =
                SweepObjective::TripletAccuracy { triplets: &triplets, k: args.refs as usize, seed: args.seed };
            sweep_kr(objective, &grid, &cfg, ctx.execution)?
        }
    };
    match args.format {
        Format::Json => {
            let objective = match args.objective {
                Objective::CorpusMean => "corpus-mean",
                Objective::Accuracy => "accuracy",
            };
            let report =
                SweepReport { toolkit_version: cider_eval::VERSION, objective, seed: args.seed, config: cfg, rows };
            emit_json(&report, args.out.as_deref())
        }
        Format::Csv => {
            let mut text = String::from("k_r,objective\n");
            for row in &rows {
                text.push_str(&format!("{},{}\n", row.k_r, row.objective));
            }
            emit(&text, args.out.as_deref())
        }
    }
}

pub fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let captions = load_captions(&args.input)?;
    let stats = corpus_stats(&captions, &args.tokenizer.options())?;
    emit_json(&stats, args.out.as_deref())
}

pub fn build(args: &BuildDfArgs) -> Result<(), Failure> {
    if args.max_n == 0 {
        return Err(Failure::Usage(anyhow::anyhow!("--max-n must be at least 1")));
    }
    let table = df_from_refs(&args.input, args.max_n, &args.tokenizer.options())?;
    save_df(&table, &args.out)?;
    eprintln!("wrote {} n-grams over {} images to {}", table.len(), table.num_images(), args.out.display());
    Ok(())
}
