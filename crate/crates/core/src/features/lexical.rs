use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::generation::Topic;

fn raw_words(label: &str) -> impl Iterator<Item = &str> {
    label
        .split(|c: char| c.is_whitespace() || c == '_')
        .filter(|w| !w.is_empty())
}

/// Lowercase words of a label with surrounding punctuation trimmed;
/// underscores separate words like spaces do.
pub fn label_words(label: &str) -> Vec<String> {
    raw_words(label)
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Number of whitespace- or underscore-separated words.
pub fn num_words(label: &str) -> Result<usize> {
    match raw_words(label).count() {
        0 => Err(Error::EmptyLabel),
        n => Ok(n),
    }
}

/// Number of distinct label words that are also topic terms.
pub fn topic_overlap(label: &str, topic: &Topic) -> usize {
    let terms: HashSet<String> = topic.terms.iter().map(|t| t.to_lowercase()).collect();
    let words: HashSet<String> = label_words(label).into_iter().collect();
    words.iter().filter(|w| terms.contains(*w)).count()
}
