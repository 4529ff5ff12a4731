//! `k_r` sweeps for CIDEr-R.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::batch::{score_batch, BatchOptions, DfSource};
use super::triplet::triplet_accuracy;
use super::{EvalBatch, TripletRecord};
use crate::error::{Error, Result};
use crate::metrics::{Metric, MetricConfig};
use crate::par::Execution;

/// What a sweep maximizes at each grid point.
#[derive(Debug, Clone, Copy)]
pub enum SweepObjective<'a> {
    /// CIDEr-R triplet accuracy with `k` sampled references.
    TripletAccuracy { triplets: &'a [TripletRecord], k: usize, seed: u64 },
    /// Corpus-mean CIDEr-R raw score.
    CorpusMean { batch: &'a EvalBatch, df: DfSource<'a> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k_r: f64,
    pub objective: f64,
}

/// `count` values drawn uniformly from [0, 1] with a fixed seed, standing in
/// for a random search over `k_r`.
pub fn random_grid(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0.0..=1.0)).collect()
}

/// Evaluates the objective at each grid value, in grid order.
pub fn sweep_kr(
    objective: SweepObjective<'_>,
    grid: &[f64],
    cfg: &MetricConfig,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::invalid("k_r grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|k| !(0.0..=1.0).contains(*k)) {
        return Err(Error::invalid(format!("k_r grid value {bad} outside [0, 1]")));
    }
    grid.iter()
        .map(|&k_r| {
            let cfg = cfg.with_k_r(k_r);
            let objective = match objective {
                SweepObjective::TripletAccuracy { triplets, k, seed } => {
                    triplet_accuracy(triplets, &Metric::CiderR, &cfg, k, seed, exec)?.accuracy
                }
                SweepObjective::CorpusMean { batch, df } => {
                    let opts = BatchOptions { penalty_breakdown: false, execution: exec };
                    let report = score_batch(batch, &[Metric::CiderR], &cfg, df, &opts)?;
                    report.mean_raw(Metric::CiderR).expect("cider-r was requested")
                }
            };
            Ok(SweepRow { k_r, objective })
        })
        .collect()
}
