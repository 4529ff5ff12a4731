use std::path::PathBuf;

use cider_eval::corpus::{load_df, save_df};
use cider_eval::harness::{read_jsonl, BatchOptions};
use cider_eval::{
    build_df, score_batch, triplet_accuracy, DfSource, EvalBatch, Execution, Metric, MetricConfig, TokenizedCaption,
    TripletRecord,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn golden() -> EvalBatch {
    EvalBatch::from_jsonl(&fixture("golden_batch.jsonl")).unwrap()
}

#[test]
fn judged_triplet_accuracies() {
    let triplets: Vec<TripletRecord> = read_jsonl(&fixture("judged_triplets.jsonl")).unwrap();
    let expected: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("judged_triplets_reference.json")).unwrap()).unwrap();
    let cfg = MetricConfig::default();
    for m in Metric::ALL {
        let report = triplet_accuracy(&triplets, &m, &cfg, 1, 0, Execution::default()).unwrap();
        let want = &expected["accuracy"][m.name()];
        println!(
            "{m}: {}/{} correct, {} ties (reference {}/{})",
            report.num_correct, report.num_triplets, report.num_ties, want[0], want[1]
        );
        assert_eq!(report.num_triplets, 15);
        if matches!(m, Metric::CiderD | Metric::RougeL) {
            assert_eq!(report.num_correct as u64, want[0].as_u64().unwrap(), "{m}");
        }
    }
}

#[test]
fn raw_scores_do_not_depend_on_report_scale() {
    let batch = golden();
    let opts = BatchOptions::default();
    let a = score_batch(&batch, &Metric::ALL, &MetricConfig::default(), DfSource::Batch, &opts).unwrap();
    let cfg = MetricConfig { report_scale: 1.0, ..MetricConfig::default() };
    let b = score_batch(&batch, &Metric::ALL, &cfg, DfSource::Batch, &opts).unwrap();
    for (x, y) in a.images.iter().zip(&b.images) {
        for m in Metric::ALL {
            assert_eq!(x.scores[&m].raw, y.scores[&m].raw);
            assert_eq!(y.scores[&m].reported, y.scores[&m].raw);
        }
    }
}

#[test]
fn saved_df_table_reproduces_self_df_scores() {
    let batch = golden();
    let cfg = MetricConfig::default();
    let sets: Vec<Vec<TokenizedCaption>> = batch
        .items
        .iter()
        .map(|it| it.references.iter().map(|r| cider_eval::tokenize(r, &cfg.tokenizer)).collect())
        .collect();
    let table = build_df(&sets, cfg.max_n).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coco.df");
    save_df(&table, &path).unwrap();
    let loaded = load_df(&path).unwrap();
    assert_eq!(loaded.len(), table.len());

    let opts = BatchOptions::default();
    let metrics = [Metric::CiderD, Metric::CiderR];
    let own = score_batch(&batch, &metrics, &cfg, DfSource::Batch, &opts).unwrap();
    let cached = score_batch(&batch, &metrics, &cfg, DfSource::Table(&loaded), &opts).unwrap();
    assert_eq!(own.images, cached.images);
    assert_eq!(own.corpus, cached.corpus);
}

#[test]
fn sequential_and_parallel_reports_match() {
    let batch = golden();
    let cfg = MetricConfig::default();
    let run = |execution| {
        let opts = BatchOptions { penalty_breakdown: true, execution };
        let report = score_batch(&batch, &Metric::ALL, &cfg, DfSource::Batch, &opts).unwrap();
        serde_json::to_string(&report).unwrap()
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn csv_has_one_row_per_image() {
    let report =
        score_batch(&golden(), &[Metric::CiderR], &MetricConfig::default(), DfSource::Batch, &BatchOptions::default())
            .unwrap();
    let csv = report.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 1 + report.images.len());
}
