#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

pub const STAGES: [&str; 9] = [
    "preprocess",
    "train-embeddings",
    "pagerank",
    "generate",
    "features",
    "train-ranker",
    "label",
    "evaluate",
    "ablate",
];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// A scratch directory holding the fixture inputs and config.
pub fn scratch() -> TempDir {
    let dir = tempfile::tempdir().expect("temp dir");
    for f in ["articles.jsonl", "topics.tsv", "gold.tsv", "netl.toml"] {
        fs::copy(fixtures().join(f), dir.path().join(f)).expect("copy fixture");
    }
    dir
}

pub fn netl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netl"))
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .args(["--config", "netl.toml"])
        .args(args)
        .output()
        .expect("spawn netl")
}

pub fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = netl(dir, args);
    assert!(
        out.status.success(),
        "netl {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Runs every stage in order with one worker.
pub fn run_pipeline(dir: &Path) {
    for stage in STAGES {
        run_ok(dir, &["--workers", "1", stage]);
    }
}

/// File name and contents of every file under `work/`, sorted by name.
pub fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join("work"))
        .expect("work dir")
        .map(|e| {
            let e = e.expect("dir entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).expect("read output"),
            )
        })
        .collect();
    files.sort();
    files
}
