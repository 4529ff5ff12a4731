//! Sentence-length and word-repetition penalties.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::textproc::TokenizedCaption;

/// `exp(-(lc - ls)^2 / (2 sigma^2))`, the CIDEr-D length penalty.
pub fn gaussian_penalty(lc: usize, ls: usize, sigma: f64) -> f64 {
    let delta = lc as f64 - ls as f64;
    (-(delta * delta) / (2.0 * sigma * sigma)).exp()
}

/// `exp(-(lc - ls)^2 / ls^2)`: the tolerated length gap grows with the
/// reference length.
pub fn length_penalty(lc: usize, ls: usize) -> Result<f64> {
    if ls == 0 {
        return Err(Error::InvalidReference("length penalty is undefined for an empty reference".into()));
    }
    let delta = lc as f64 - ls as f64;
    let ls = ls as f64;
    Ok((-(delta * delta) / (ls * ls)).exp())
}

pub(crate) fn word_counts(c: &TokenizedCaption) -> FxHashMap<&str, u32> {
    let mut counts = FxHashMap::with_capacity_and_hasher(c.length(), Default::default());
    for t in c.tokens() {
        *counts.entry(t.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Geometric penalty over the distinct candidate words.
///
/// A word shared with the reference contributes `1 / (1 + |freq_c - freq_s|)`;
/// a word absent from the reference contributes `1 / freq_c`. Each factor is
/// raised to `1 / len(c)`. An empty candidate yields 1.
pub fn repetition_penalty(c: &TokenizedCaption, s: &TokenizedCaption) -> f64 {
    repetition_penalty_counts(&word_counts(c), c.length(), &word_counts(s))
}

pub(crate) fn repetition_penalty_counts(
    cand: &FxHashMap<&str, u32>,
    cand_len: usize,
    reference: &FxHashMap<&str, u32>,
) -> f64 {
    if cand_len == 0 {
        return 1.0;
    }
    // sum of ln f, then a single exponent; a literal product underflows for long captions
    let log_sum: f64 = cand
        .iter()
        .map(|(w, &fc)| {
            let fc = fc as f64;
            match reference.get(w) {
                Some(&fs) => -(1.0 + (fc - fs as f64).abs()).ln(),
                None => -fc.ln(),
            }
        })
        .sum();
    (log_sum / cand_len as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cap(s: &str) -> TokenizedCaption {
        TokenizedCaption::pretokenized(s)
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_penalty(10, 10, 6.0), 1.0);
        assert_abs_diff_eq!(gaussian_penalty(4, 10, 6.0), 0.606531, epsilon = 1e-6);
        assert_abs_diff_eq!(gaussian_penalty(2, 4, 6.0), 0.945959, epsilon = 1e-6);
    }

    #[test]
    fn length_examples() {
        assert_eq!(length_penalty(7, 7).unwrap(), 1.0);
        assert_abs_diff_eq!(length_penalty(4, 10).unwrap(), 0.697676, epsilon = 1e-6);
        assert_abs_diff_eq!(length_penalty(2, 4).unwrap(), 0.778801, epsilon = 1e-6);
        assert!(matches!(length_penalty(3, 0), Err(Error::InvalidReference(_))));
    }

    #[test]
    fn repetition_examples() {
        assert_abs_diff_eq!(repetition_penalty(&cap("a a b"), &cap("a b c d")), 0.793701, epsilon = 1e-6);
        assert_eq!(repetition_penalty(&cap("a b c"), &cap("a b c")), 1.0);
        assert_abs_diff_eq!(repetition_penalty(&cap("x x"), &cap("a b")), 0.5f64.sqrt(), epsilon = 1e-6);
        assert_eq!(repetition_penalty(&TokenizedCaption::default(), &cap("a b")), 1.0);
    }

    #[test]
    fn repetition_is_one_for_unique_unshared_words() {
        assert_eq!(repetition_penalty(&cap("x y z"), &cap("a b")), 1.0);
    }

    #[test]
    fn long_repetitive_candidate_stays_positive() {
        let c = TokenizedCaption::from_tokens((0..2000).map(|i| format!("w{}", i % 7)));
        let p = repetition_penalty(&c, &cap("w0"));
        assert!(p > 0.0 && p < 1.0);
    }
}
