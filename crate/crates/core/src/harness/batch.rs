use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalBatch;
use crate::corpus::{build_df, DfProvenance, DfTable};
use crate::error::{Error, Result};
use crate::metrics::cider::{CiderContext, Variant};
use crate::metrics::{bleu4_corpus, BleuStats, Metric, MetricConfig, SentenceScore};
use crate::par::{map_ordered, Execution};
use crate::textproc::{tokenize, TokenizedCaption};

/// Where CIDEr's document frequencies come from.
#[derive(Debug, Clone, Copy)]
pub enum DfSource<'a> {
    /// Build from the batch's own references.
    Batch,
    /// Use a prebuilt (typically loaded) table.
    Table(&'a DfTable),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BatchOptions {
    /// Keep per-reference penalty breakdowns in the report.
    pub penalty_breakdown: bool,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolkitInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolkitInfo {
    fn default() -> Self {
        ToolkitInfo { name: "cider-eval".into(), version: crate::VERSION.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfInfo {
    pub provenance: DfProvenance,
    pub num_images: usize,
    pub num_ngrams: usize,
}

impl DfInfo {
    pub fn of(table: &DfTable) -> Self {
        DfInfo { provenance: table.provenance().clone(), num_images: table.num_images(), num_ngrams: table.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScores {
    pub image_id: String,
    pub scores: BTreeMap<Metric, SentenceScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMean {
    /// Arithmetic mean of the per-image raw scores, in image order.
    pub mean_raw: f64,
    pub mean_reported: f64,
    /// Corpus-level BLEU-4 (summed counts, unsmoothed); BLEU only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_level_raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub toolkit: ToolkitInfo,
    pub config: MetricConfig,
    pub df: DfInfo,
    pub metrics: Vec<Metric>,
    pub images: Vec<ImageScores>,
    pub corpus: BTreeMap<Metric, CorpusMean>,
}

impl BatchReport {
    /// Flattens the per-image scores to `image_id,metric,raw,reported` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        w.write_record(["image_id", "metric", "raw", "reported"]).map_err(csv_err)?;
        for img in &self.images {
            for (m, s) in &img.scores {
                w.write_record([img.image_id.as_str(), m.name(), &s.raw.to_string(), &s.reported.to_string()])
                    .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn mean_raw(&self, metric: Metric) -> Option<f64> {
        self.corpus.get(&metric).map(|c| c.mean_raw)
    }
}

struct Prepared {
    candidate: TokenizedCaption,
    references: Vec<TokenizedCaption>,
}

fn prepare(batch: &EvalBatch, cfg: &MetricConfig, exec: Execution) -> Vec<Prepared> {
    map_ordered(exec, &batch.items, |_, item| Prepared {
        candidate: tokenize(&item.candidate, &cfg.tokenizer),
        references: item.references.iter().map(|r| tokenize(r, &cfg.tokenizer)).collect(),
    })
}

fn score_image(
    p: &Prepared,
    metrics: &[Metric],
    table: &DfTable,
    cfg: &MetricConfig,
) -> Result<BTreeMap<Metric, SentenceScore>> {
    let mut out = BTreeMap::new();
    let cider = if metrics.iter().any(|m| m.uses_df()) {
        Some(CiderContext::new(&p.candidate, &p.references, table, cfg)?)
    } else {
        None
    };
    for &m in metrics {
        let score = match (m, &cider) {
            (Metric::CiderD, Some(ctx)) => ctx.score(Variant::D, cfg)?,
            (Metric::CiderR, Some(ctx)) => ctx.score(Variant::R, cfg)?,
            _ => m.score(&p.candidate, &p.references, table, cfg)?,
        };
        out.insert(m, score);
    }
    Ok(out)
}

/// Scores every image of `batch` with each metric.
///
/// With [`DfSource::Batch`] the document frequencies come from the batch's own
/// references. Images are scored independently (in parallel when requested)
/// and corpus means are accumulated in image order, so the report does not
/// depend on the thread count.
pub fn score_batch(
    batch: &EvalBatch,
    metrics: &[Metric],
    cfg: &MetricConfig,
    df_source: DfSource<'_>,
    opts: &BatchOptions,
) -> Result<BatchReport> {
    cfg.validate()?;
    batch.validate()?;
    if metrics.is_empty() {
        return Err(Error::invalid("no metrics selected"));
    }
    let mut metrics = metrics.to_vec();
    metrics.dedup();

    let prepared = prepare(batch, cfg, opts.execution);
    let owned;
    let table = match df_source {
        DfSource::Table(t) => t,
        DfSource::Batch => {
            let sets: Vec<Vec<TokenizedCaption>> = prepared.iter().map(|p| p.references.clone()).collect();
            owned = build_df(&sets, cfg.max_n)?.with_provenance(DfProvenance::Batch);
            &owned
        }
    };

    let per_image: Vec<Result<BTreeMap<Metric, SentenceScore>>> = map_ordered(opts.execution, &prepared, |i, p| {
        score_image(p, &metrics, table, cfg).map_err(|e| match e {
            Error::InvalidReference(msg) => {
                Error::InvalidReference(format!("image `{}`: {msg}", batch.items[i].image_id))
            }
            other => other,
        })
    });

    let mut images = Vec::with_capacity(batch.len());
    for (item, scores) in batch.items.iter().zip(per_image) {
        let mut scores = scores?;
        if !opts.penalty_breakdown {
            scores.values_mut().for_each(|s| s.penalties.clear());
        }
        images.push(ImageScores { image_id: item.image_id.clone(), scores });
    }

    let mut corpus = BTreeMap::new();
    for &m in &metrics {
        let mut sum = 0.0;
        for img in &images {
            sum += img.scores[&m].raw;
        }
        let mean_raw = sum / images.len() as f64;
        let corpus_level_raw = if m == Metric::Bleu4 {
            let stats =
                prepared.iter().map(|p| BleuStats::collect(&p.candidate, &p.references)).collect::<Result<Vec<_>>>()?;
            Some(bleu4_corpus(&stats)?)
        } else {
            None
        };
        corpus.insert(m, CorpusMean { mean_raw, mean_reported: mean_raw * cfg.report_scale, corpus_level_raw });
    }

    Ok(BatchReport { toolkit: ToolkitInfo::default(), config: *cfg, df: DfInfo::of(table), metrics, images, corpus })
}
