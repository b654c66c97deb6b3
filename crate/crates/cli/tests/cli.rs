mod common;

use std::collections::BTreeMap;
use std::fs;

use common::{netl, outputs, run_ok, run_pipeline, scratch};

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exit code")
}

fn labels_per_topic(tsv: &str) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for line in tsv.lines().skip(1) {
        *counts.entry(line.split('\t').next().unwrap().to_string()).or_insert(0) += 1;
    }
    counts
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = scratch();
    assert_eq!(code(&netl(dir.path(), &["no-such-stage"])), 2);
    assert_eq!(code(&netl(dir.path(), &["generate", "--out-k", "many"])), 2);
}

#[test]
fn missing_inputs_exit_with_three() {
    let dir = scratch();
    let out = netl(dir.path(), &["preprocess", "--input", "absent.jsonl"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    // nothing upstream has run yet
    assert_eq!(code(&netl(dir.path(), &["generate"])), 3);
    assert_eq!(code(&netl(dir.path(), &["--set", "nonsense.key=1", "pagerank"])), 3);
}

#[test]
fn malformed_gold_exits_with_three() {
    let dir = scratch();
    for stage in ["preprocess", "train-embeddings", "pagerank", "generate", "features"] {
        run_ok(dir.path(), &["--workers", "1", stage]);
    }
    fs::write(dir.path().join("gold.tsv"), "topic_id\tlabel\tmean_rating\tn_annotations\nc1\tx\tnot-a-number\t4\n")
        .unwrap();
    let out = netl(dir.path(), &["train-ranker"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pipeline_outputs_and_flags() {
    let dir = scratch();
    run_pipeline(dir.path());
    let files: Vec<String> = outputs(dir.path()).into_iter().map(|(n, _)| n).collect();
    for f in ["candidates.tsv", "features.tsv", "model.json", "labels.tsv", "report.tsv", "ablation.tsv"] {
        assert!(files.contains(&f.to_string()), "{f} missing from {files:?}");
    }
    assert!(
        !files.iter().any(|f| f.starts_with('.') || f.ends_with(".tmp")),
        "leftover temp files: {files:?}"
    );

    // rerunning a stage reproduces its output
    let before = fs::read(dir.path().join("work/labels.tsv")).unwrap();
    run_ok(dir.path(), &["--workers", "1", "label"]);
    assert_eq!(before, fs::read(dir.path().join("work/labels.tsv")).unwrap());

    run_ok(dir.path(), &["--workers", "1", "generate", "--k-per-source", "19", "--out-k", "19"]);
    let candidates = fs::read_to_string(dir.path().join("work/candidates.tsv")).unwrap();
    let counts = labels_per_topic(&candidates);
    assert_eq!(counts.len(), 6);
    assert!(counts.values().all(|&n| n == 19), "{counts:?}");

    run_ok(dir.path(), &["--workers", "1", "--set", "generation.out_k=3", "generate"]);
    let candidates = fs::read_to_string(dir.path().join("work/candidates.tsv")).unwrap();
    assert!(labels_per_topic(&candidates).values().all(|&n| n == 3));

    let out = run_ok(dir.path(), &["--workers", "1", "evaluate", "--folds", "3", "--runs", "1"]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("Upper Bound"), "{table}");
    let report = fs::read_to_string(dir.path().join("work/report.tsv")).unwrap();
    assert!(report.starts_with("test_domain\ttraining\t"));
}
