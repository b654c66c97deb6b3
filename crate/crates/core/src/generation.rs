//! Candidate generation: score every title against a topic's terms with
//! both embedding models, keep the best of each, and rank the union by the
//! summed relevance.
//!
//! For a title `a` and topic terms `T`, the relevance under one model is the
//! mean over `v ∈ T` of `cos(E_title(a), E_word(v))`. The document model
//! uses the dbow document vector of `a` and dbow word vectors; the word
//! model uses the skip-gram vector of the collapsed title token and
//! skip-gram word vectors. Combined relevance is the sum of the two.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{title_token, word_form};
use crate::embeddings::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::tsv;

pub const DEFAULT_TOPIC_TERMS: usize = 10;
pub const DEFAULT_K_PER_SOURCE: usize = 100;
pub const DEFAULT_OUT_K: usize = 19;

#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub id: String,
    pub domain: String,
    pub terms: Vec<String>,
    pub term_probs: Option<Vec<f64>>,
}

impl Topic {
    pub fn new(id: &str, domain: &str, terms: &[&str]) -> Self {
        Topic {
            id: id.to_string(),
            domain: domain.to_string(),
            terms: terms.iter().map(|t| t.to_string()).collect(),
            term_probs: None,
        }
    }

    pub fn with_probs(mut self, probs: &[f64]) -> Self {
        self.term_probs = Some(probs.to_vec());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| {
            Err(Error::InvalidTopic {
                id: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.terms.is_empty() {
            return invalid("no terms");
        }
        if self.terms.iter().any(|t| t.to_lowercase() != *t || t.is_empty()) {
            return invalid("terms must be non-empty and lowercase");
        }
        if let Some(p) = &self.term_probs {
            if p.len() != self.terms.len() {
                return invalid("term_probs length differs from terms");
            }
            if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return invalid("term_probs must be positive");
            }
        }
        Ok(())
    }

    /// The first `n` terms (and their probabilities).
    pub fn truncated(&self, n: usize) -> Topic {
        let n = n.min(self.terms.len());
        Topic {
            id: self.id.clone(),
            domain: self.domain.clone(),
            terms: self.terms[..n].to_vec(),
            term_probs: self.term_probs.as_ref().map(|p| p[..n].to_vec()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TopicRow {
    id: String,
    domain: String,
    terms: String,
    #[serde(default)]
    probs: String,
}

/// Topics file: header `id domain terms probs`, terms and probabilities
/// space-separated, `probs` may be empty or absent.
pub fn read_topics(path: &Path) -> Result<Vec<Topic>> {
    let rows: Vec<TopicRow> = tsv::read(path)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.into_iter().enumerate() {
        let line = i + 2;
        let terms: Vec<String> = r.terms.split_whitespace().map(str::to_lowercase).collect();
        let term_probs = if r.probs.trim().is_empty() {
            None
        } else {
            Some(
                r.probs
                    .split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Error::parse(path, line, format!("bad probability: {e}")))?,
            )
        };
        let topic = Topic {
            id: r.id,
            domain: r.domain,
            terms,
            term_probs,
        };
        topic
            .validate()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        out.push(topic);
    }
    Ok(out)
}

pub fn write_topics<W: std::io::Write>(out: W, topics: &[Topic], path: &Path) -> Result<()> {
    let rows: Vec<TopicRow> = topics
        .iter()
        .map(|t| TopicRow {
            id: t.id.clone(),
            domain: t.domain.clone(),
            terms: t.terms.join(" "),
            probs: t
                .term_probs
                .as_ref()
                .map(|p| p.iter().map(f64::to_string).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
        })
        .collect();
    tsv::write_to(out, &rows, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    DocModel,
    WordModel,
}

/// The three tables candidate generation reads.
#[derive(Debug, Clone, Copy)]
pub struct TitleEmbeddings<'a> {
    /// dbow document vectors keyed by underscore-joined document titles.
    pub documents: &'a EmbeddingTable,
    /// Word vectors of the dbow model.
    pub doc_words: &'a EmbeddingTable,
    /// Skip-gram vectors of words and collapsed title tokens.
    pub words: &'a EmbeddingTable,
}

/// Key of a document title in the document table.
pub fn doc_key(title: &str) -> String {
    title_token(title)
}

/// Key of a title's collapsed token in the skip-gram table.
pub fn word_key(title: &str) -> String {
    title_token(&word_form(title))
}

impl<'a> TitleEmbeddings<'a> {
    pub fn title_vector(&self, source: ModelSource, title: &str) -> Result<&'a [f32]> {
        let found = match source {
            ModelSource::DocModel => self.documents.get(&doc_key(title)),
            ModelSource::WordModel => self.words.get(&word_key(title)),
        };
        found.ok_or_else(|| Error::UnknownTitle(title.to_string()))
    }

    pub fn term_table(&self, source: ModelSource) -> &'a EmbeddingTable {
        match source {
            ModelSource::DocModel => self.doc_words,
            ModelSource::WordModel => self.words,
        }
    }
}

/// Vectors of the topic terms found in `table`, with their positions in the
/// topic. Missing terms are skipped; a topic with no term in the table is
/// an error.
fn term_vectors<'t>(topic: &Topic, table: &'t EmbeddingTable) -> Result<Vec<(usize, &'t [f32])>> {
    let found: Vec<_> = topic
        .terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| table.get(t).map(|v| (i, v)))
        .collect();
    if found.is_empty() {
        return Err(Error::NoTermCoverage(topic.id.clone()));
    }
    Ok(found)
}

fn mean_cosine(title: &[f32], terms: &[(usize, &[f32])]) -> Result<f64> {
    let mut sum = 0.0;
    for (_, v) in terms {
        sum += cosine(title, v)?;
    }
    Ok(sum / terms.len() as f64)
}

fn weighted_cosine(title: &[f32], terms: &[(usize, &[f32])], probs: &[f64]) -> Result<f64> {
    let weights: Vec<f64> = terms.iter().map(|&(i, _)| probs[i]).collect();
    if weights.iter().all(|&w| w == weights[0]) {
        // equal weights are the plain mean, bit for bit
        return mean_cosine(title, terms);
    }
    let mut sum = 0.0;
    for ((_, v), w) in terms.iter().zip(&weights) {
        sum += w * cosine(title, v)?;
    }
    Ok(sum / weights.iter().sum::<f64>())
}

fn centroid_cosine(title: &[f32], terms: &[(usize, &[f32])]) -> Result<f64> {
    let mut centroid = vec![0.0f64; title.len()];
    for (_, v) in terms {
        if v.len() != centroid.len() {
            return Err(Error::DimensionMismatch {
                expected: centroid.len(),
                found: v.len(),
            });
        }
        for (c, &x) in centroid.iter_mut().zip(v.iter()) {
            *c += x as f64;
        }
    }
    let n = terms.len() as f64;
    centroid.iter_mut().for_each(|c| *c /= n);
    cosine(title, &centroid)
}

/// Document-model relevance: mean cosine between the title's document
/// vector and the dbow word vectors of the topic terms.
pub fn rel_d2v(
    title: &str,
    topic: &Topic,
    doc_table: &EmbeddingTable,
    word_table: &EmbeddingTable,
) -> Result<f64> {
    let v = doc_table
        .get(&doc_key(title))
        .ok_or_else(|| Error::UnknownTitle(title.to_string()))?;
    mean_cosine(v, &term_vectors(topic, word_table)?)
}

/// Word-model relevance: mean cosine between the collapsed title token and
/// the skip-gram vectors of the topic terms.
pub fn rel_w2v(title: &str, topic: &Topic, word_table: &EmbeddingTable) -> Result<f64> {
    let v = word_table
        .get(&word_key(title))
        .ok_or_else(|| Error::UnknownTitle(title.to_string()))?;
    mean_cosine(v, &term_vectors(topic, word_table)?)
}

/// Relevance with each term's cosine weighted by its topic probability
/// (weights renormalized over the terms present in the vocabulary).
pub fn rel_weighted(
    source: ModelSource,
    title: &str,
    topic: &Topic,
    tables: &TitleEmbeddings,
) -> Result<f64> {
    let probs = topic
        .term_probs
        .as_ref()
        .ok_or_else(|| Error::MissingTermProbs(topic.id.clone()))?;
    let v = tables.title_vector(source, title)?;
    weighted_cosine(v, &term_vectors(topic, tables.term_table(source))?, probs)
}

/// Cosine between the title vector and the mean of the term vectors.
pub fn rel_centroid(
    source: ModelSource,
    title: &str,
    topic: &Topic,
    tables: &TitleEmbeddings,
) -> Result<f64> {
    let v = tables.title_vector(source, title)?;
    centroid_cosine(v, &term_vectors(topic, tables.term_table(source))?)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Arithmetic mean of per-term cosines.
    #[default]
    Mean,
    /// Probability-weighted mean of per-term cosines.
    Weighted,
    /// Cosine with the centroid of the term vectors.
    Centroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub topic_terms: usize,
    pub k_per_source: usize,
    pub out_k: usize,
    pub aggregation: Aggregation,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            topic_terms: DEFAULT_TOPIC_TERMS,
            k_per_source: DEFAULT_K_PER_SOURCE,
            out_k: DEFAULT_OUT_K,
            aggregation: Aggregation::Mean,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.topic_terms < 1 || self.k_per_source < 1 || self.out_k < 1 {
            return Err(Error::Config(
                "topic_terms, k_per_source and out_k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateLabel {
    pub label: String,
    pub rel_d2v: f64,
    pub rel_w2v: f64,
    pub rel_combined: f64,
    /// Which per-model top-k lists the label came from.
    pub sources: BTreeSet<ModelSource>,
}

/// Titles resolvable in both models, with their vectors looked up once.
pub struct CandidatePool<'a> {
    tables: TitleEmbeddings<'a>,
    labels: Vec<String>,
    doc_vectors: Vec<&'a [f32]>,
    word_vectors: Vec<&'a [f32]>,
    skipped: usize,
}

impl<'a> CandidatePool<'a> {
    /// Builds the pool from document titles. Titles without a document
    /// vector or without a collapsed-token vector are skipped and counted.
    pub fn new<I, S>(titles: I, tables: TitleEmbeddings<'a>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut pool = CandidatePool {
            tables,
            labels: Vec::new(),
            doc_vectors: Vec::new(),
            word_vectors: Vec::new(),
            skipped: 0,
        };
        for t in titles {
            let t = t.as_ref();
            match (
                tables.title_vector(ModelSource::DocModel, t),
                tables.title_vector(ModelSource::WordModel, t),
            ) {
                (Ok(d), Ok(w)) => {
                    pool.labels.push(t.to_string());
                    pool.doc_vectors.push(d);
                    pool.word_vectors.push(w);
                }
                _ => pool.skipped += 1,
            }
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn score_all(
        &self,
        vectors: &[&[f32]],
        terms: &[(usize, &[f32])],
        topic: &Topic,
        aggregation: Aggregation,
    ) -> Result<Vec<f64>> {
        let probs = match aggregation {
            Aggregation::Weighted => Some(
                topic
                    .term_probs
                    .as_deref()
                    .ok_or_else(|| Error::MissingTermProbs(topic.id.clone()))?,
            ),
            _ => None,
        };
        vectors
            .par_iter()
            .map(|v| match aggregation {
                Aggregation::Mean => mean_cosine(v, terms),
                Aggregation::Weighted => weighted_cosine(v, terms, probs.expect("checked above")),
                Aggregation::Centroid => centroid_cosine(v, terms),
            })
            .collect()
    }

    /// Relevance of every pooled title under both models, in pool order.
    pub fn relevances(&self, topic: &Topic, aggregation: Aggregation) -> Result<(Vec<f64>, Vec<f64>)> {
        let doc_terms = term_vectors(topic, self.tables.doc_words)?;
        let word_terms = term_vectors(topic, self.tables.words)?;
        Ok((
            self.score_all(&self.doc_vectors, &doc_terms, topic, aggregation)?,
            self.score_all(&self.word_vectors, &word_terms, topic, aggregation)?,
        ))
    }

    /// Ranked candidates for `topic`: the top `k_per_source` titles by each
    /// model's relevance, pooled, re-scored by the sum of both relevances,
    /// and cut to `out_k`. Ties are broken by label.
    pub fn generate(&self, topic: &Topic, cfg: &GenerationConfig) -> Result<Vec<CandidateLabel>> {
        cfg.validate()?;
        topic.validate()?;
        let topic = topic.truncated(cfg.topic_terms);
        let (d2v, w2v) = self.relevances(&topic, cfg.aggregation)?;
        let by_doc = self.top_k(&d2v, cfg.k_per_source);
        let by_word = self.top_k(&w2v, cfg.k_per_source);

        let mut union: Vec<(usize, BTreeSet<ModelSource>)> = Vec::new();
        let mut slot = vec![usize::MAX; self.len()];
        for (list, source) in [(by_doc, ModelSource::DocModel), (by_word, ModelSource::WordModel)] {
            for i in list {
                if slot[i] == usize::MAX {
                    slot[i] = union.len();
                    union.push((i, BTreeSet::new()));
                }
                union[slot[i]].1.insert(source);
            }
        }
        let mut out: Vec<CandidateLabel> = union
            .into_iter()
            .map(|(i, sources)| CandidateLabel {
                label: self.labels[i].clone(),
                rel_d2v: d2v[i],
                rel_w2v: w2v[i],
                rel_combined: d2v[i] + w2v[i],
                sources,
            })
            .collect();
        out.sort_by(|a, b| {
            b.rel_combined
                .total_cmp(&a.rel_combined)
                .then_with(|| a.label.cmp(&b.label))
        });
        out.truncate(cfg.out_k);
        Ok(out)
    }

    fn top_k(&self, scores: &[f64], k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        let cmp = |&a: &usize, &b: &usize| {
            scores[b]
                .total_cmp(&scores[a])
                .then_with(|| self.labels[a].cmp(&self.labels[b]))
        };
        if k < idx.len() {
            idx.select_nth_unstable_by(k, cmp);
            idx.truncate(k);
        }
        idx.sort_by(cmp);
        idx
    }
}

/// Convenience wrapper building a pool for a single call.
pub fn generate_candidates<I, S>(
    topic: &Topic,
    titles: I,
    tables: TitleEmbeddings,
    cfg: &GenerationConfig,
) -> Result<Vec<CandidateLabel>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    CandidatePool::new(titles, tables).generate(topic, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub topic_id: String,
    pub rank: usize,
    pub label: String,
    pub rel_d2v: f64,
    pub rel_w2v: f64,
    pub rel_combined: f64,
}

pub fn candidate_rows(topic_id: &str, candidates: &[CandidateLabel]) -> Vec<CandidateRow> {
    candidates
        .iter()
        .enumerate()
        .map(|(i, c)| CandidateRow {
            topic_id: topic_id.to_string(),
            rank: i + 1,
            label: c.label.clone(),
            rel_d2v: c.rel_d2v,
            rel_w2v: c.rel_w2v,
            rel_combined: c.rel_combined,
        })
        .collect()
}
