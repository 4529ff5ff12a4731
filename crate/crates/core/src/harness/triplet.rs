//! Triplet accuracy: how often a metric prefers the candidate humans preferred.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{TripletRecord, Vote};
use crate::corpus::{build_df, DfTable};
use crate::error::{Error, Result};
use crate::metrics::{Metric, MetricConfig};
use crate::par::{map_ordered, Execution};
use crate::textproc::{tokenize, TokenizedCaption};

/// Anything that scores a candidate against references. Only the relative
/// order of the two candidates of a triplet matters.
pub trait TripletScorer: Sync {
    fn name(&self) -> String;

    fn score(
        &self,
        cand: &TokenizedCaption,
        refs: &[TokenizedCaption],
        table: &DfTable,
        cfg: &MetricConfig,
    ) -> Result<f64>;
}

impl TripletScorer for Metric {
    fn name(&self) -> String {
        Metric::name(*self).to_owned()
    }

    fn score(
        &self,
        cand: &TokenizedCaption,
        refs: &[TokenizedCaption],
        table: &DfTable,
        cfg: &MetricConfig,
    ) -> Result<f64> {
        Metric::score(*self, cand, refs, table, cfg).map(|s| s.raw)
    }
}

/// Adapts a closure into a [`TripletScorer`].
pub struct FnScorer<F> {
    pub name: String,
    pub f: F,
}

impl<F> FnScorer<F>
where
    F: Fn(&TokenizedCaption, &[TokenizedCaption], &DfTable) -> f64 + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnScorer { name: name.into(), f }
    }
}

impl<F> TripletScorer for FnScorer<F>
where
    F: Fn(&TokenizedCaption, &[TokenizedCaption], &DfTable) -> f64 + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn score(
        &self,
        cand: &TokenizedCaption,
        refs: &[TokenizedCaption],
        table: &DfTable,
        _: &MetricConfig,
    ) -> Result<f64> {
        Ok((self.f)(cand, refs, table))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub metric_name: String,
    /// Requested number of references per triplet.
    pub num_refs_used: usize,
    pub accuracy: f64,
    pub num_triplets: usize,
    pub num_correct: usize,
    /// Equal scores; counted as incorrect.
    pub num_ties: usize,
    /// Triplets with fewer than `num_refs_used` references (all of theirs were used).
    pub num_short: usize,
    pub seed: u64,
}

/// Seeded shuffle of `refs`, truncated to `k` items. Deterministic for fixed
/// inputs; `k >= refs.len()` returns the whole (shuffled) list.
pub fn subsample_refs<T: Clone>(refs: &[T], k: usize, seed: u64) -> Vec<T> {
    let mut out = refs.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out.truncate(k);
    out
}

fn triplet_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct Prepared {
    refs: Vec<TokenizedCaption>,
    b: TokenizedCaption,
    c: TokenizedCaption,
    vote: Vote,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Correct,
    Tie,
    Wrong,
}

/// Scores both candidates of every triplet against `k` sampled references and
/// counts agreement with the human vote.
///
/// References are drawn by a seeded shuffle per triplet. Document frequencies
/// treat each triplet's sampled references as one image. Ties count as
/// incorrect and are reported in `num_ties`.
pub fn triplet_accuracy<S: TripletScorer + ?Sized>(
    triplets: &[TripletRecord],
    scorer: &S,
    cfg: &MetricConfig,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<AccuracyReport> {
    cfg.validate()?;
    if triplets.is_empty() {
        return Err(Error::invalid("triplet list is empty"));
    }
    if k == 0 {
        return Err(Error::invalid("number of references must be at least 1"));
    }
    if let Some(i) = triplets.iter().position(|t| t.references.is_empty()) {
        return Err(Error::invalid(format!("triplet {i} has no references")));
    }

    let prepared: Vec<Prepared> = map_ordered(exec, triplets, |i, t| {
        let sampled = subsample_refs(&t.references, k, triplet_seed(seed, i));
        Prepared {
            refs: sampled.iter().map(|r| tokenize(r, &cfg.tokenizer)).collect(),
            b: tokenize(&t.cand_b, &cfg.tokenizer),
            c: tokenize(&t.cand_c, &cfg.tokenizer),
            vote: t.human_vote,
        }
    });
    let num_short = triplets.iter().filter(|t| t.references.len() < k).count();

    let sets: Vec<Vec<TokenizedCaption>> = prepared.iter().map(|p| p.refs.clone()).collect();
    let table = build_df(&sets, cfg.max_n)?;

    let outcomes: Vec<Result<Outcome>> = map_ordered(exec, &prepared, |_, p| {
        let sb = scorer.score(&p.b, &p.refs, &table, cfg)?;
        let sc = scorer.score(&p.c, &p.refs, &table, cfg)?;
        let (winner, loser) = match p.vote {
            Vote::B => (sb, sc),
            Vote::C => (sc, sb),
        };
        Ok(if winner > loser {
            Outcome::Correct
        } else if winner == loser {
            Outcome::Tie
        } else {
            Outcome::Wrong
        })
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let num_correct = outcomes.iter().filter(|&&o| o == Outcome::Correct).count();
    let num_ties = outcomes.iter().filter(|&&o| o == Outcome::Tie).count();
    Ok(AccuracyReport {
        metric_name: scorer.name(),
        num_refs_used: k,
        accuracy: num_correct as f64 / triplets.len() as f64,
        num_triplets: triplets.len(),
        num_correct,
        num_ties,
        num_short,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triplet(refs: &[&str], b: &str, c: &str, vote: Vote) -> TripletRecord {
        TripletRecord {
            references: refs.iter().map(|&r| r.into()).collect(),
            cand_b: b.into(),
            cand_c: c.into(),
            human_vote: vote,
        }
    }

    #[test]
    fn subsample_is_deterministic() {
        let refs: Vec<u32> = (0..48).collect();
        assert_eq!(subsample_refs(&refs, 5, 7), subsample_refs(&refs, 5, 7));
        assert_eq!(subsample_refs(&refs, 5, 7).len(), 5);
        let mut all = subsample_refs(&refs, 100, 3);
        assert_eq!(all.len(), 48);
        all.sort();
        assert_eq!(all, refs);
        let singles: std::collections::HashSet<u32> = (0..20).map(|s| subsample_refs(&refs, 1, s)[0]).collect();
        assert!(singles.len() > 1);
    }

    #[test]
    fn length_oracle_and_constant() {
        let ts = vec![triplet(&["a b c"], "a b c d", "a", Vote::B), triplet(&["x y"], "x", "x y z", Vote::C)];
        let cfg = MetricConfig::default();
        let len =
            FnScorer::new("length", |c: &TokenizedCaption, _: &[TokenizedCaption], _: &DfTable| c.length() as f64);
        let r = triplet_accuracy(&ts, &len, &cfg, 1, 0, Execution::default()).unwrap();
        assert_eq!((r.accuracy, r.num_ties), (1.0, 0));

        let constant = FnScorer::new("const", |_: &TokenizedCaption, _: &[TokenizedCaption], _: &DfTable| 1.0);
        let r = triplet_accuracy(&ts, &constant, &cfg, 1, 0, Execution::default()).unwrap();
        assert_eq!((r.accuracy, r.num_ties, r.num_correct), (0.0, 2, 0));
    }

    #[test]
    fn shortfall_is_recorded() {
        let ts = vec![triplet(&["a b"], "a", "b", Vote::B), triplet(&["a", "b", "c"], "a", "b", Vote::B)];
        let r = triplet_accuracy(&ts, &Metric::RougeL, &MetricConfig::default(), 2, 1, Execution::default()).unwrap();
        assert_eq!(r.num_short, 1);
        assert_eq!(r.num_refs_used, 2);
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = MetricConfig::default();
        assert!(triplet_accuracy(&[], &Metric::CiderR, &cfg, 1, 0, Execution::default()).is_err());
        let ts = vec![triplet(&["a"], "a", "b", Vote::B)];
        assert!(triplet_accuracy(&ts, &Metric::CiderR, &cfg, 0, 0, Execution::default()).is_err());
        let ts = vec![triplet(&[], "a", "b", Vote::B)];
        assert!(triplet_accuracy(&ts, &Metric::CiderR, &cfg, 1, 0, Execution::default()).is_err());
    }

    fn sentence() -> impl Strategy<Value = String> {
        prop::collection::vec(prop::sample::select(vec!["a", "dog", "cat", "runs", "on", "grass", "the"]), 1..7)
            .prop_map(|w| w.join(" "))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn invariant_under_relabeling(
            raw in prop::collection::vec((prop::collection::vec(sentence(), 1..4), sentence(), sentence(), any::<bool>()), 1..8),
            k in 1usize..4,
            seed in any::<u64>(),
        ) {
            let ts: Vec<TripletRecord> = raw.iter().map(|(refs, b, c, v)| TripletRecord {
                references: refs.iter().map(|r| r.as_str().into()).collect(),
                cand_b: b.as_str().into(),
                cand_c: c.as_str().into(),
                human_vote: if *v { Vote::B } else { Vote::C },
            }).collect();
            let swapped: Vec<TripletRecord> = ts.iter().map(TripletRecord::swapped).collect();
            let cfg = MetricConfig::default();
            for m in Metric::ALL {
                let a = triplet_accuracy(&ts, &m, &cfg, k, seed, Execution::default()).unwrap();
                let b = triplet_accuracy(&swapped, &m, &cfg, k, seed, Execution::default()).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert!((0.0..=1.0).contains(&a.accuracy));
                prop_assert!(a.num_correct + a.num_ties <= a.num_triplets);
            }
        }
    }
}
