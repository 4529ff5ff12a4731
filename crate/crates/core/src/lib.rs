//! Caption evaluation metrics built around consensus TF-IDF n-gram similarity.
//!
//! The crate implements CIDEr-D and the repetition/length-aware CIDEr-R
//! variant, together with sentence-level BLEU-4 and ROUGE-L baselines, and the
//! experimental harnesses that drive them: batch scoring, triplet accuracy
//! against human votes, `k_r` sweeps and corpus statistics.
//!
//! Text flows through the crate in one direction:
//!
//! ```text
//! RawCaption --tokenize--> TokenizedCaption --n-grams--> DfTable / NGramVector --> metrics
//! ```
//!
//! Batch work runs in parallel through rayon when the `parallel` feature is
//! enabled (the default). Every reported number is independent of the thread
//! count: images are scored independently and aggregated in input order.

pub mod corpus;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod textproc;

pub use corpus::{build_df, extract_ngrams, idf, tfidf_vector, DfProvenance, DfTable, NGramKey, NGramVector};
pub use error::{Error, Result};
pub use harness::{
    corpus_stats, score_batch, subsample_refs, sweep_kr, triplet_accuracy, AccuracyReport, BatchReport, CorpusStats,
    DfSource, EvalBatch, EvalItem, SweepObjective, SweepRow, TripletRecord, Vote,
};
pub use metrics::{
    bleu4, cider_d, cider_r, clipped_similarity, gaussian_penalty, length_penalty, repetition_penalty, rouge_l, Metric,
    MetricConfig, PenaltyBreakdown, SentenceScore,
};
pub use par::Execution;
pub use textproc::{tokenize, RawCaption, TokenizedCaption, TokenizerOptions};

/// Toolkit version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
