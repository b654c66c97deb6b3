use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use netl_core::corpus::{DEFAULT_MAX_TITLE_WORDS, DEFAULT_MIN_BODY_TOKENS};
use netl_core::evaluation::EvalConfig;
use netl_core::features::PageRankConfig;
use netl_core::generation::GenerationConfig;
use netl_core::{SvrConfig, TrainConfig};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub raw_articles: PathBuf,
    pub articles: PathBuf,
    pub doc_lexicon: PathBuf,
    pub word_lexicon: PathBuf,
    pub collapsed: PathBuf,
    pub doc_vectors: PathBuf,
    pub doc_word_vectors: PathBuf,
    pub word_vectors: PathBuf,
    pub pagerank: PathBuf,
    pub topics: PathBuf,
    pub candidates: PathBuf,
    pub features: PathBuf,
    pub gold: PathBuf,
    pub model: PathBuf,
    pub labels: PathBuf,
    pub report: PathBuf,
    pub quality: PathBuf,
    pub ablation: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        let w = |name: &str| PathBuf::from("work").join(name);
        Paths {
            raw_articles: "articles.jsonl".into(),
            articles: w("articles.jsonl"),
            doc_lexicon: w("lexicon_doc.tsv"),
            word_lexicon: w("lexicon_word.tsv"),
            collapsed: w("collapsed.txt"),
            doc_vectors: w("doc_vectors.txt"),
            doc_word_vectors: w("doc_word_vectors.txt"),
            word_vectors: w("word_vectors.txt"),
            pagerank: w("pagerank.tsv"),
            topics: "topics.tsv".into(),
            candidates: w("candidates.tsv"),
            features: w("features.tsv"),
            gold: "gold.tsv".into(),
            model: w("model.json"),
            labels: w("labels.tsv"),
            report: w("report.tsv"),
            quality: w("quality.tsv"),
            ablation: w("ablation.tsv"),
        }
    }
}

impl Paths {
    fn rebase(&mut self, base: &Path) {
        for p in [
            &mut self.raw_articles,
            &mut self.articles,
            &mut self.doc_lexicon,
            &mut self.word_lexicon,
            &mut self.collapsed,
            &mut self.doc_vectors,
            &mut self.doc_word_vectors,
            &mut self.word_vectors,
            &mut self.pagerank,
            &mut self.topics,
            &mut self.candidates,
            &mut self.features,
            &mut self.gold,
            &mut self.model,
            &mut self.labels,
            &mut self.report,
            &mut self.quality,
            &mut self.ablation,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub min_body_tokens: usize,
    pub max_title_words: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            min_body_tokens: DEFAULT_MIN_BODY_TOKENS,
            max_title_words: DEFAULT_MAX_TITLE_WORDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub corpus: CorpusConfig,
    pub dbow: TrainConfig,
    pub skipgram: TrainConfig,
    pub pagerank: PageRankConfig,
    pub generation: GenerationConfig,
    pub ranker: SvrConfig,
    pub evaluation: EvalConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: Paths::default(),
            corpus: CorpusConfig::default(),
            dbow: TrainConfig::desk_dbow(),
            skipgram: TrainConfig::desk_skipgram(),
            pagerank: PageRankConfig::default(),
            generation: GenerationConfig::default(),
            ranker: SvrConfig::default(),
            evaluation: EvalConfig::default(),
        }
    }
}

/// Sets `a.b.c = value` in a TOML table, creating intermediate tables.
/// The value is parsed as a TOML literal and taken as a string otherwise.
fn apply_override(root: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| InputError(format!("override {assignment:?} is not key=value")))?;
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields one part");
    let mut table = root;
    for part in parents {
        table = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| InputError(format!("override {key:?}: {part} is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

/// Loads the config file (or defaults), applies `key=value` overrides, and
/// resolves relative paths against the config file's directory.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<PipelineConfig> {
    let (mut table, base) = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| InputError(format!("cannot read config {}: {e}", p.display())))?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| InputError(format!("{}: {e}", p.display())))?;
            (table, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (toml::Table::new(), PathBuf::new()),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let mut cfg: PipelineConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e| InputError(format!("invalid config: {e}")))
        .context("loading pipeline config")?;
    cfg.paths.rebase(&base);
    Ok(cfg)
}
