//! Letter-trigram distributions and the unsupervised ranking built on them.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::generation::Topic;

use super::lexical::label_words;

/// Maximum-likelihood distribution over character trigrams.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigramDistribution {
    probs: BTreeMap<String, f64>,
}

impl TrigramDistribution {
    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn get(&self, trigram: &str) -> f64 {
        self.probs.get(trigram).copied().unwrap_or(0.0)
    }

    /// Cosine between the two probability vectors.
    pub fn cosine(&self, other: &TrigramDistribution) -> f64 {
        let (small, large) = if self.probs.len() <= other.probs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let dot: f64 = small
            .probs
            .iter()
            .map(|(k, p)| p * large.get(k))
            .sum();
        let norm = |d: &TrigramDistribution| d.probs.values().map(|p| p * p).sum::<f64>().sqrt();
        (dot / (norm(self) * norm(other))).clamp(0.0, 1.0)
    }
}

/// Counts every contiguous 3-character substring of each string separately
/// (no trigram spans two strings, no boundary padding) and normalizes.
pub fn trigram_distribution<I, S>(strings: I) -> Result<TrigramDistribution>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for s in strings {
        let chars: Vec<char> = s.as_ref().chars().collect();
        for w in chars.windows(3) {
            *counts.entry(w.iter().collect()).or_default() += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::NoTrigrams);
    }
    let probs = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total as f64))
        .collect();
    Ok(TrigramDistribution { probs })
}

pub fn topic_distribution(topic: &Topic) -> Result<TrigramDistribution> {
    trigram_distribution(&topic.terms)
}

pub fn label_distribution(label: &str) -> Result<TrigramDistribution> {
    trigram_distribution(label_words(label))
}

/// Cosine between the trigram distribution of the label's words and that of
/// the topic terms.
pub fn letter_trigram_similarity(label: &str, topic: &Topic) -> Result<f64> {
    Ok(label_distribution(label)?.cosine(&topic_distribution(topic)?))
}

/// Candidates ordered by trigram similarity to the topic, best first, ties
/// broken by label. Labels too short to yield a trigram score 0. The
/// returned rank of each label is its 1-based position.
pub fn unsupervised_rank<S: AsRef<str>>(labels: &[S], topic: &Topic) -> Result<Vec<(String, f64)>> {
    let topic_dist = topic_distribution(topic)?;
    let mut scored: Vec<(String, f64)> = labels
        .iter()
        .map(|l| {
            let l = l.as_ref();
            let sim = match label_distribution(l) {
                Ok(d) => d.cosine(&topic_dist),
                Err(Error::NoTrigrams) => 0.0,
                Err(e) => return Err(e),
            };
            Ok((l.to_string(), sim))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(scored)
}
