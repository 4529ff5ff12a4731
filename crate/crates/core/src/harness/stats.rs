use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{tokenize, RawCaption, TokenizerOptions};

/// Size, vocabulary and length profile of a caption collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub dataset_size: usize,
    /// Distinct unigram tokens.
    pub vocabulary_size: usize,
    pub avg_sentence_length: f64,
    /// Population standard deviation.
    pub std_sentence_length: f64,
}

pub fn corpus_stats(captions: &[RawCaption], opts: &TokenizerOptions) -> Result<CorpusStats> {
    if captions.is_empty() {
        return Err(Error::invalid("no captions to summarize"));
    }
    let mut vocab: HashSet<String> = HashSet::new();
    let mut lengths = Vec::with_capacity(captions.len());
    for c in captions {
        let t = tokenize(c, opts);
        lengths.push(t.length() as f64);
        vocab.extend(t.tokens().iter().cloned());
    }
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let var = lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
    Ok(CorpusStats {
        dataset_size: captions.len(),
        vocabulary_size: vocab.len(),
        avg_sentence_length: mean,
        std_sentence_length: var.sqrt(),
    })
}
