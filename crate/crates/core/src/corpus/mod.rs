//! N-gram extraction, document frequencies and TF-IDF vectors.

mod df_file;

use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::TokenizedCaption;

pub use df_file::{load_df, save_df, write_df};

/// A contiguous run of 1..=N tokens.
///
/// Tokens never contain whitespace, so the single-space join is a
/// collision-free key and doubles as the on-disk representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NGramKey {
    arity: u8,
    text: Box<str>,
}

impl NGramKey {
    pub fn new<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut text = String::with_capacity(tokens.iter().map(|t| t.as_ref().len() + 1).sum());
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            text.push_str(t.as_ref());
        }
        NGramKey { arity: tokens.len() as u8, text: text.into_boxed_str() }
    }

    /// Parses a space-joined key. Returns `None` for an empty string.
    pub fn parse(joined: &str) -> Option<Self> {
        let tokens: Vec<&str> = joined.split_whitespace().collect();
        if tokens.is_empty() || tokens.len() > u8::MAX as usize {
            return None;
        }
        Some(NGramKey::new(&tokens))
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.text.split(' ')
    }
}

impl fmt::Display for NGramKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Sparse vector over n-grams of one arity. Weights are nonnegative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NGramVector {
    arity: usize,
    entries: FxHashMap<NGramKey, f64>,
}

impl NGramVector {
    pub fn new(arity: usize) -> Self {
        NGramVector { arity, entries: FxHashMap::default() }
    }

    /// Builds a vector from explicit entries. Fails on mixed arities or
    /// negative/non-finite weights.
    pub fn from_entries(arity: usize, entries: impl IntoIterator<Item = (NGramKey, f64)>) -> Result<Self> {
        let mut v = NGramVector::new(arity);
        for (k, w) in entries {
            if k.arity() != arity {
                return Err(Error::invalid(format!("n-gram `{k}` has arity {} in a {arity}-gram vector", k.arity())));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight {w} for `{k}` is not a nonnegative finite number")));
            }
            v.entries.insert(k, w);
        }
        Ok(v)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, key: &NGramKey) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NGramKey, f64)> {
        self.entries.iter().map(|(k, &w)| (k, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Where a [`DfTable`] came from. Scores are corpus dependent, so reports
/// carry this along.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DfProvenance {
    /// Built from the references of the batch being scored.
    Batch,
    /// Built from a separate references file.
    RefsFile { path: String },
    /// Loaded from a persisted table.
    File { path: String },
    /// Built programmatically.
    InMemory,
}

/// Per-n-gram document frequencies over a set of images. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct DfTable {
    df: FxHashMap<NGramKey, u32>,
    num_images: usize,
    max_n: usize,
    log_num_images: f64,
    provenance: DfProvenance,
}

impl DfTable {
    pub(crate) fn from_parts(
        df: FxHashMap<NGramKey, u32>,
        num_images: usize,
        max_n: usize,
        provenance: DfProvenance,
    ) -> Result<Self> {
        if num_images == 0 {
            return Err(Error::invalid("document-frequency table needs at least one image"));
        }
        if max_n == 0 {
            return Err(Error::invalid("max_n must be at least 1"));
        }
        for (k, &d) in &df {
            if d == 0 || d as usize > num_images {
                return Err(Error::invalid(format!("df of `{k}` is {d}, outside 1..={num_images}")));
            }
            if k.arity() > max_n {
                return Err(Error::invalid(format!("n-gram `{k}` is longer than max_n={max_n}")));
            }
        }
        Ok(DfTable { df, num_images, max_n, log_num_images: (num_images as f64).ln(), provenance })
    }

    pub fn num_images(&self) -> usize {
        self.num_images
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Stored document frequency, 0 for unseen n-grams.
    pub fn df(&self, key: &NGramKey) -> u32 {
        self.df.get(key).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.df.len()
    }

    pub fn is_empty(&self) -> bool {
        self.df.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NGramKey, u32)> {
        self.df.iter().map(|(k, &d)| (k, d))
    }

    pub fn provenance(&self) -> &DfProvenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: DfProvenance) -> Self {
        self.provenance = provenance;
        self
    }
}

fn check_arity(n: usize, max_n: usize) -> Result<()> {
    if n == 0 || n > max_n {
        return Err(Error::invalid(format!("n-gram arity {n} outside 1..={max_n}")));
    }
    Ok(())
}

/// Counts the contiguous `n`-grams of `c`.
pub fn extract_ngrams(c: &TokenizedCaption, n: usize, max_n: usize) -> Result<FxHashMap<NGramKey, u32>> {
    check_arity(n, max_n)?;
    Ok(count_ngrams(c, n))
}

pub(crate) fn count_ngrams(c: &TokenizedCaption, n: usize) -> FxHashMap<NGramKey, u32> {
    let tokens = c.tokens();
    let mut counts = FxHashMap::default();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(NGramKey::new(window)).or_insert(0) += 1;
        }
    }
    counts
}

/// Builds document frequencies: `df[k]` is the number of images with at least
/// one reference containing `k`.
pub fn build_df(reference_sets: &[Vec<TokenizedCaption>], max_n: usize) -> Result<DfTable> {
    if reference_sets.is_empty() {
        return Err(Error::invalid("cannot build document frequencies from an empty corpus"));
    }
    check_arity(1, max_n)?;
    let mut df: FxHashMap<NGramKey, u32> = FxHashMap::default();
    let mut seen: FxHashSet<NGramKey> = FxHashSet::default();
    for refs in reference_sets {
        seen.clear();
        for r in refs {
            for n in 1..=max_n {
                seen.extend(count_ngrams(r, n).into_keys());
            }
        }
        for k in seen.drain() {
            *df.entry(k).or_insert(0) += 1;
        }
    }
    DfTable::from_parts(df, reference_sets.len(), max_n, DfProvenance::InMemory)
}

/// `ln(num_images) - ln(max(1, df))`; unseen n-grams get the maximum weight.
pub fn idf(table: &DfTable, key: &NGramKey) -> f64 {
    let df = table.df(key).max(1) as f64;
    table.log_num_images - df.ln()
}

/// TF-IDF vector of `c` over its `n`-grams (raw count times IDF). Zero
/// weights are omitted.
pub fn tfidf_vector(c: &TokenizedCaption, n: usize, table: &DfTable) -> Result<NGramVector> {
    check_arity(n, table.max_n)?;
    Ok(tfidf_unchecked(c, n, table))
}

pub(crate) fn tfidf_unchecked(c: &TokenizedCaption, n: usize, table: &DfTable) -> NGramVector {
    let entries = count_ngrams(c, n)
        .into_iter()
        .filter_map(|(k, count)| {
            let w = count as f64 * idf(table, &k);
            (w > 0.0).then_some((k, w))
        })
        .collect();
    NGramVector { arity: n, entries }
}
