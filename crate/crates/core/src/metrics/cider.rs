//! CIDEr-D and CIDEr-R.
//!
//! Both variants share the per-arity clipped TF-IDF similarity and differ only
//! in the per-reference penalty multiplied into it:
//!
//! * CIDEr-D: Gaussian penalty on the length gap, `sigma = 6` by default.
//! * CIDEr-R: `Pen_R^k_r * Pen_L^(1 - k_r)`, the repetition penalty blended
//!   geometrically with the reference-relative length penalty.
//!
//! Per arity `n`, the score is `(10 / m) * sum_j sim_n(c, s_j) * penalty_j`
//! over the `m` references, and the final score is the plain mean over
//! `n = 1..=N`. An arity where either vector has zero norm contributes 0 but
//! still counts in the mean.

use rustc_hash::FxHashMap;

use super::penalty::{gaussian_penalty, length_penalty, repetition_penalty_counts, word_counts};
use super::{check_refs, MetricConfig, PenaltyBreakdown, SentenceScore};
use crate::corpus::{tfidf_unchecked, DfTable, NGramVector};
use crate::error::{Error, Result};
use crate::textproc::TokenizedCaption;

/// `sum_k min(c_k, r_k) * r_k / (|c| |r|)`, or 0 when either norm is 0.
pub fn clipped_similarity(cand_vec: &NGramVector, ref_vec: &NGramVector) -> Result<f64> {
    if cand_vec.arity() != ref_vec.arity() {
        return Err(Error::invalid(format!(
            "cannot compare {}-gram and {}-gram vectors",
            cand_vec.arity(),
            ref_vec.arity()
        )));
    }
    Ok(similarity_with_norms(cand_vec, cand_vec.norm(), ref_vec, ref_vec.norm()))
}

fn similarity_with_norms(cand: &NGramVector, cand_norm: f64, reference: &NGramVector, ref_norm: f64) -> f64 {
    if cand_norm == 0.0 || ref_norm == 0.0 {
        return 0.0;
    }
    let dot: f64 = cand
        .iter()
        .map(|(k, wc)| {
            let wr = reference.get(k);
            wc.min(wr) * wr
        })
        .sum();
    // bounded by Cauchy-Schwarz; clamp rounding overshoot on identical vectors
    (dot / (cand_norm * ref_norm)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Variant {
    D,
    R,
}

struct Profile<'a> {
    vectors: Vec<NGramVector>,
    norms: Vec<f64>,
    length: usize,
    words: FxHashMap<&'a str, u32>,
}

impl<'a> Profile<'a> {
    fn new(c: &'a TokenizedCaption, table: &DfTable, max_n: usize) -> Self {
        let vectors: Vec<NGramVector> = (1..=max_n).map(|n| tfidf_unchecked(c, n, table)).collect();
        let norms = vectors.iter().map(NGramVector::norm).collect();
        Profile { vectors, norms, length: c.length(), words: word_counts(c) }
    }
}

/// Candidate and reference TF-IDF profiles computed once and reused by both
/// CIDEr variants.
pub(crate) struct CiderContext<'a> {
    cand: Profile<'a>,
    refs: Vec<Profile<'a>>,
    /// `[ref][arity]` similarities.
    sims: Vec<Vec<f64>>,
}

impl<'a> CiderContext<'a> {
    pub(crate) fn new(
        c: &'a TokenizedCaption,
        refs: &'a [TokenizedCaption],
        table: &DfTable,
        cfg: &MetricConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        check_refs(refs)?;
        if cfg.max_n > table.max_n() {
            return Err(Error::invalid(format!(
                "max_n={} exceeds the document-frequency table's max_n={}",
                cfg.max_n,
                table.max_n()
            )));
        }
        if let Some(i) = refs.iter().position(TokenizedCaption::is_empty) {
            return Err(Error::InvalidReference(format!("reference {i} is empty")));
        }
        let cand = Profile::new(c, table, cfg.max_n);
        let refs: Vec<Profile> = refs.iter().map(|r| Profile::new(r, table, cfg.max_n)).collect();
        let sims = refs
            .iter()
            .map(|r| {
                (0..cfg.max_n)
                    .map(|n| similarity_with_norms(&cand.vectors[n], cand.norms[n], &r.vectors[n], r.norms[n]))
                    .collect()
            })
            .collect();
        Ok(CiderContext { cand, refs, sims })
    }

    fn penalties(&self, variant: Variant, cfg: &MetricConfig) -> Result<Vec<PenaltyBreakdown>> {
        self.refs
            .iter()
            .map(|r| {
                let gaussian = gaussian_penalty(self.cand.length, r.length, cfg.sigma);
                let length_pen = length_penalty(self.cand.length, r.length)?;
                let repetition_pen = repetition_penalty_counts(&self.cand.words, self.cand.length, &r.words);
                let combined = match variant {
                    Variant::D => gaussian,
                    Variant::R => repetition_pen.powf(cfg.k_r) * length_pen.powf(1.0 - cfg.k_r),
                };
                Ok(PenaltyBreakdown { gaussian, length_pen, repetition_pen, combined })
            })
            .collect()
    }

    pub(crate) fn score(&self, variant: Variant, cfg: &MetricConfig) -> Result<SentenceScore> {
        let penalties = self.penalties(variant, cfg)?;
        let scale = 10.0 / self.refs.len() as f64;
        let per_n: Vec<f64> = (0..cfg.max_n)
            .map(|n| scale * self.sims.iter().zip(&penalties).map(|(s, p)| s[n] * p.combined).sum::<f64>())
            .collect();
        let raw = per_n.iter().sum::<f64>() / cfg.max_n as f64;
        Ok(SentenceScore::new(raw, cfg, per_n, penalties))
    }
}

pub fn cider_d(
    c: &TokenizedCaption,
    refs: &[TokenizedCaption],
    table: &DfTable,
    cfg: &MetricConfig,
) -> Result<SentenceScore> {
    CiderContext::new(c, refs, table, cfg)?.score(Variant::D, cfg)
}

pub fn cider_r(
    c: &TokenizedCaption,
    refs: &[TokenizedCaption],
    table: &DfTable,
    cfg: &MetricConfig,
) -> Result<SentenceScore> {
    CiderContext::new(c, refs, table, cfg)?.score(Variant::R, cfg)
}
