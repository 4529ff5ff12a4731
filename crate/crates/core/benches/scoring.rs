//! Batch scoring throughput, sequential path against the rayon path.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cider_eval::harness::BatchOptions;
use cider_eval::{score_batch, DfSource, EvalBatch, EvalItem, Execution, Metric, MetricConfig, RawCaption};

fn synthetic_batch(images: usize, avg_len: usize, seed: u64) -> EvalBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentence = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(avg_len / 2..=avg_len * 3 / 2);
        let words: Vec<String> = (0..len).map(|_| format!("w{}", rng.gen_range(0..2000))).collect();
        RawCaption(words.join(" "))
    };
    let items = (0..images)
        .map(|i| EvalItem {
            image_id: i.to_string(),
            candidate: sentence(&mut rng),
            references: vec![sentence(&mut rng)],
        })
        .collect();
    EvalBatch::new(items)
}

fn bench_execution(c: &mut Criterion) {
    let batch = synthetic_batch(2_000, 38, 1);
    let cfg = MetricConfig::default();
    let metrics = [Metric::CiderR, Metric::CiderD];
    let mut group = c.benchmark_group("score_batch_2000x38");
    group.sample_size(10);
    for (name, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        let opts = BatchOptions { penalty_breakdown: false, execution };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| score_batch(black_box(&batch), &metrics, &cfg, DfSource::Batch, opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_execution);
criterion_main!(benches);
