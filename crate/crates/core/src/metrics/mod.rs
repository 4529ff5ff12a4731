//! Metric kernels: CIDEr-D, CIDEr-R, BLEU-4 and ROUGE-L.

mod bleu;
pub(crate) mod cider;
mod penalty;
mod rouge;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::DfTable;
use crate::error::{Error, Result};
use crate::textproc::{TokenizedCaption, TokenizerOptions};

pub use bleu::{bleu4, bleu4_corpus, BleuStats};
pub use cider::{cider_d, cider_r, clipped_similarity};
pub use penalty::{gaussian_penalty, length_penalty, repetition_penalty};
pub use rouge::{lcs_len, rouge_l};

/// Metric hyper-parameters. Defaults: `max_n = 4`, `sigma = 6`, `k_r = 0.8`,
/// `report_scale = 100`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub max_n: usize,
    pub sigma: f64,
    /// Weight of the repetition penalty in CIDEr-R; the length penalty gets `1 - k_r`.
    pub k_r: f64,
    pub report_scale: f64,
    #[serde(default)]
    pub tokenizer: TokenizerOptions,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { max_n: 4, sigma: 6.0, k_r: 0.8, report_scale: 100.0, tokenizer: TokenizerOptions::default() }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(Error::invalid("max_n must be at least 1"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(0.0..=1.0).contains(&self.k_r) {
            return Err(Error::invalid(format!("k_r must lie in [0, 1], got {}", self.k_r)));
        }
        if !(self.report_scale > 0.0 && self.report_scale.is_finite()) {
            return Err(Error::invalid(format!("report_scale must be positive, got {}", self.report_scale)));
        }
        Ok(())
    }

    pub fn with_k_r(mut self, k_r: f64) -> Self {
        self.k_r = k_r;
        self
    }
}

/// Penalties applied to one (candidate, reference) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    pub gaussian: f64,
    pub length_pen: f64,
    pub repetition_pen: f64,
    /// The factor actually multiplied into the similarity.
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub raw: f64,
    pub reported: f64,
    /// Per-arity CIDEr terms, or the modified n-gram precisions for BLEU.
    /// Empty for ROUGE-L.
    pub per_n: Vec<f64>,
    /// One entry per reference, CIDEr family only.
    pub penalties: Vec<PenaltyBreakdown>,
}

impl SentenceScore {
    pub(crate) fn new(raw: f64, cfg: &MetricConfig, per_n: Vec<f64>, penalties: Vec<PenaltyBreakdown>) -> Self {
        SentenceScore { raw, reported: raw * cfg.report_scale, per_n, penalties }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "cider-d")]
    CiderD,
    #[serde(rename = "cider-r")]
    CiderR,
    #[serde(rename = "bleu-4")]
    Bleu4,
    #[serde(rename = "rouge-l")]
    RougeL,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::CiderR, Metric::CiderD, Metric::Bleu4, Metric::RougeL];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CiderD => "cider-d",
            Metric::CiderR => "cider-r",
            Metric::Bleu4 => "bleu-4",
            Metric::RougeL => "rouge-l",
        }
    }

    /// Whether the metric needs a document-frequency table.
    pub fn uses_df(self) -> bool {
        matches!(self, Metric::CiderD | Metric::CiderR)
    }

    pub fn score(
        self,
        c: &TokenizedCaption,
        refs: &[TokenizedCaption],
        table: &DfTable,
        cfg: &MetricConfig,
    ) -> Result<SentenceScore> {
        match self {
            Metric::CiderD => cider_d(c, refs, table, cfg),
            Metric::CiderR => cider_r(c, refs, table, cfg),
            Metric::Bleu4 => {
                let stats = BleuStats::collect(c, refs)?;
                Ok(SentenceScore::new(stats.sentence_bleu(), cfg, stats.smoothed_precisions().to_vec(), Vec::new()))
            }
            Metric::RougeL => Ok(SentenceScore::new(rouge_l(c, refs)?, cfg, Vec::new(), Vec::new())),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "cider-d" | "ciderd" => Ok(Metric::CiderD),
            "cider-r" | "ciderr" => Ok(Metric::CiderR),
            "bleu-4" | "bleu4" | "bleu" => Ok(Metric::Bleu4),
            "rouge-l" | "rougel" | "rouge" => Ok(Metric::RougeL),
            other => Err(Error::invalid(format!("unknown metric `{other}`"))),
        }
    }
}

pub(crate) fn check_refs(refs: &[TokenizedCaption]) -> Result<()> {
    if refs.is_empty() {
        return Err(Error::invalid("reference list is empty"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert_eq!("BLEU4".parse::<Metric>().unwrap(), Metric::Bleu4);
        assert!("meteor".parse::<Metric>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(MetricConfig::default().validate().is_ok());
        assert!(MetricConfig { k_r: 1.2, ..Default::default() }.validate().is_err());
        assert!(MetricConfig { sigma: 0.0, ..Default::default() }.validate().is_err());
        assert!(MetricConfig { max_n: 0, ..Default::default() }.validate().is_err());
        assert!(MetricConfig { report_scale: -1.0, ..Default::default() }.validate().is_err());
    }
}
