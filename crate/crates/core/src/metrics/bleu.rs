//! BLEU-4 with closest-reference brevity penalty.

use rustc_hash::FxHashMap;

use super::check_refs;
use crate::corpus::{count_ngrams, NGramKey};
use crate::error::{Error, Result};
use crate::textproc::TokenizedCaption;

const ORDER: usize = 4;
/// Stand-in for a zero precision at sentence level.
const SMOOTHING_FLOOR: f64 = 1e-9;

/// Clipped n-gram match counts for one candidate, the sufficient statistics
/// for both sentence- and corpus-level BLEU.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BleuStats {
    pub matches: [u64; ORDER],
    pub totals: [u64; ORDER],
    pub cand_len: usize,
    /// Length of the reference closest to the candidate; ties go to the shorter one.
    pub ref_len: usize,
    precisions: [f64; ORDER],
}

impl BleuStats {
    pub fn collect(c: &TokenizedCaption, refs: &[TokenizedCaption]) -> Result<Self> {
        check_refs(refs)?;
        let mut stats = BleuStats { cand_len: c.length(), ..Default::default() };
        stats.ref_len =
            refs.iter().map(TokenizedCaption::length).min_by_key(|&l| (l.abs_diff(c.length()), l)).unwrap_or(0);
        for n in 1..=ORDER {
            let mut max_ref: FxHashMap<NGramKey, u32> = FxHashMap::default();
            for r in refs {
                for (k, cnt) in count_ngrams(r, n) {
                    let e = max_ref.entry(k).or_insert(0);
                    *e = (*e).max(cnt);
                }
            }
            let cand = count_ngrams(c, n);
            stats.matches[n - 1] =
                cand.iter().map(|(k, &cnt)| cnt.min(max_ref.get(k).copied().unwrap_or(0)) as u64).sum();
            stats.totals[n - 1] = c.length().saturating_sub(n - 1) as u64;
        }
        for n in 0..ORDER {
            stats.precisions[n] =
                if stats.matches[n] == 0 { SMOOTHING_FLOOR } else { stats.matches[n] as f64 / stats.totals[n] as f64 };
        }
        Ok(stats)
    }

    pub fn smoothed_precisions(&self) -> &[f64; ORDER] {
        &self.precisions
    }

    pub fn sentence_bleu(&self) -> f64 {
        if self.cand_len == 0 {
            return 0.0;
        }
        let log_mean = self.precisions.iter().map(|p| p.ln()).sum::<f64>() / ORDER as f64;
        brevity(self.cand_len, self.ref_len) * log_mean.exp()
    }
}

fn brevity(cand_len: usize, ref_len: usize) -> f64 {
    (1.0 - ref_len as f64 / cand_len as f64).min(0.0).exp()
}

/// Sentence-level BLEU-4 with epsilon smoothing of zero precisions.
pub fn bleu4(c: &TokenizedCaption, refs: &[TokenizedCaption]) -> Result<f64> {
    Ok(BleuStats::collect(c, refs)?.sentence_bleu())
}

/// Corpus-level BLEU-4: match counts, totals and lengths are summed over all
/// pairs before the geometric mean. Unsmoothed, so any arity without a match
/// makes the score 0.
pub fn bleu4_corpus(stats: &[BleuStats]) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::invalid("corpus BLEU needs at least one sentence"));
    }
    let cand_len: usize = stats.iter().map(|s| s.cand_len).sum();
    let ref_len: usize = stats.iter().map(|s| s.ref_len).sum();
    if cand_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for n in 0..ORDER {
        let m: u64 = stats.iter().map(|s| s.matches[n]).sum();
        let t: u64 = stats.iter().map(|s| s.totals[n]).sum();
        if m == 0 || t == 0 {
            return Ok(0.0);
        }
        log_sum += (m as f64 / t as f64).ln();
    }
    Ok(brevity(cand_len, ref_len) * (log_sum / ORDER as f64).exp())
}
