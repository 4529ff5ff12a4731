//! Experimental protocols: batch scoring, triplet accuracy against human
//! votes, `k_r` sweeps and corpus statistics.

mod batch;
mod io;
mod stats;
mod sweep;
mod triplet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::RawCaption;

pub use batch::{score_batch, BatchOptions, BatchReport, CorpusMean, DfInfo, DfSource, ImageScores, ToolkitInfo};
pub use io::{load_captions, read_jsonl, read_jsonl_from, ReferenceRecord};
pub use stats::{corpus_stats, CorpusStats};
pub use sweep::{random_grid, sweep_kr, SweepObjective, SweepRow};
pub use triplet::{subsample_refs, triplet_accuracy, AccuracyReport, FnScorer, TripletScorer};

/// One image of an evaluation batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    pub image_id: String,
    pub candidate: RawCaption,
    pub references: Vec<RawCaption>,
}

/// Candidates with their reference sets. Image ids are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalBatch {
    pub items: Vec<EvalItem>,
}

impl EvalBatch {
    pub fn new(items: Vec<EvalItem>) -> Self {
        EvalBatch { items }
    }

    pub fn from_jsonl(path: &std::path::Path) -> Result<Self> {
        Ok(EvalBatch { items: read_jsonl(path)? })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::invalid("evaluation batch is empty"));
        }
        let mut seen = std::collections::HashSet::with_capacity(self.items.len());
        for item in &self.items {
            if !seen.insert(item.image_id.as_str()) {
                return Err(Error::DuplicateImageId(item.image_id.clone()));
            }
            if item.references.is_empty() {
                return Err(Error::invalid(format!("image `{}` has no references", item.image_id)));
            }
        }
        Ok(())
    }
}

/// Majority human preference within a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vote {
    B,
    C,
}

impl Vote {
    pub fn flipped(self) -> Self {
        match self {
            Vote::B => Vote::C,
            Vote::C => Vote::B,
        }
    }
}

/// A reference pool and two candidates, with the human majority vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletRecord {
    pub references: Vec<RawCaption>,
    #[serde(rename = "b")]
    pub cand_b: RawCaption,
    #[serde(rename = "c")]
    pub cand_c: RawCaption,
    #[serde(rename = "vote")]
    pub human_vote: Vote,
}

impl TripletRecord {
    /// The same judgement with B and C exchanged.
    pub fn swapped(&self) -> Self {
        TripletRecord {
            references: self.references.clone(),
            cand_b: self.cand_c.clone(),
            cand_c: self.cand_b.clone(),
            human_vote: self.human_vote.flipped(),
        }
    }
}
