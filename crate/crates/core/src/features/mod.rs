//! Reranking features for (topic, candidate) pairs.

mod lexical;
mod pagerank;
mod trigram;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use lexical::{label_words, num_words, topic_overlap};
pub use pagerank::{
    pagerank, read_scores, read_scores_from, title_pagerank, write_scores, LinkGraph, PageRank,
    PageRankConfig,
};
pub use trigram::{
    label_distribution, letter_trigram_similarity, topic_distribution, trigram_distribution,
    unsupervised_rank, TrigramDistribution,
};

use crate::corpus::TitleLexicon;
use crate::error::{Error, Result};
use crate::generation::Topic;
use crate::tsv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    LetterTrigram,
    #[serde(rename = "pagerank")]
    PageRank,
    TopicOverlap,
    NumWords,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::LetterTrigram,
        Feature::PageRank,
        Feature::TopicOverlap,
        Feature::NumWords,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::LetterTrigram => "letter_trigram",
            Feature::PageRank => "pagerank",
            Feature::TopicOverlap => "topic_overlap",
            Feature::NumWords => "num_words",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub letter_trigram_rank: u32,
    pub pagerank: f64,
    pub topic_overlap: u32,
    pub num_words: u32,
}

impl FeatureVector {
    /// Values in [`Feature::ALL`] order.
    pub fn values(&self) -> [f64; 4] {
        [
            self.letter_trigram_rank as f64,
            self.pagerank,
            self.topic_overlap as f64,
            self.num_words as f64,
        ]
    }
}

/// Features for every candidate label of `topic`, in input order. The
/// letter-trigram rank is the label's position in the unsupervised
/// trigram ranking of the same candidate set.
pub fn compute_features<S: AsRef<str>>(
    topic: &Topic,
    labels: &[S],
    lexicon: &TitleLexicon,
    pagerank_scores: &BTreeMap<u64, f64>,
) -> Result<Vec<(String, FeatureVector)>> {
    let ranked = unsupervised_rank(labels, topic)?;
    let rank_of: BTreeMap<&str, u32> = ranked
        .iter()
        .enumerate()
        .map(|(i, (l, _))| (l.as_str(), i as u32 + 1))
        .collect();
    labels
        .iter()
        .map(|l| {
            let l = l.as_ref();
            Ok((
                l.to_string(),
                FeatureVector {
                    letter_trigram_rank: rank_of[l],
                    pagerank: title_pagerank(l, lexicon, pagerank_scores)?,
                    topic_overlap: topic_overlap(l, topic) as u32,
                    num_words: num_words(l)? as u32,
                },
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub topic_id: String,
    pub label: String,
    pub letter_trigram_rank: u32,
    pub pagerank: f64,
    pub topic_overlap: u32,
    pub num_words: u32,
}

impl FeatureRow {
    pub fn new(topic_id: &str, label: &str, fv: &FeatureVector) -> Self {
        FeatureRow {
            topic_id: topic_id.to_string(),
            label: label.to_string(),
            letter_trigram_rank: fv.letter_trigram_rank,
            pagerank: fv.pagerank,
            topic_overlap: fv.topic_overlap,
            num_words: fv.num_words,
        }
    }

    pub fn features(&self) -> FeatureVector {
        FeatureVector {
            letter_trigram_rank: self.letter_trigram_rank,
            pagerank: self.pagerank,
            topic_overlap: self.topic_overlap,
            num_words: self.num_words,
        }
    }
}

/// Feature table: header `topic_id label letter_trigram_rank pagerank
/// topic_overlap num_words`.
pub fn read_feature_rows(path: &Path) -> Result<Vec<FeatureRow>> {
    let rows: Vec<FeatureRow> = tsv::read(path)?;
    for (i, r) in rows.iter().enumerate() {
        if r.letter_trigram_rank < 1
            || !(r.pagerank > 0.0)
            || r.num_words < 1
            || r.topic_overlap > r.num_words
        {
            return Err(Error::parse(path, i + 2, "feature values out of range"));
        }
    }
    Ok(rows)
}

/// Rows grouped by topic id, keeping first-appearance order of topics and
/// row order within each topic.
pub fn group_by_topic(rows: &[FeatureRow]) -> Vec<(String, Vec<(String, FeatureVector)>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<(String, FeatureVector)>> = BTreeMap::new();
    for r in rows {
        let g = groups.entry(r.topic_id.as_str()).or_insert_with(|| {
            order.push(r.topic_id.clone());
            Vec::new()
        });
        g.push((r.label.clone(), r.features()));
    }
    order
        .into_iter()
        .map(|id| {
            let g = groups.remove(id.as_str()).expect("grouped above");
            (id, g)
        })
        .collect()
}
