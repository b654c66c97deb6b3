//! Article ingestion, filtering and title handling.
//!
//! Input is line-delimited JSON, one article per line:
//!
//! ```text
//! {"id": 12, "title": "Democratic Party (United States)", "body": "...", "outlinks": [3, 99]}
//! ```
//!
//! `outlinks` may be omitted. Filtered stores are written back in the same
//! format with `body` replaced by the space-joined token sequence, which
//! tokenizes to itself.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MIN_BODY_TOKENS: usize = 40;
pub const DEFAULT_MAX_TITLE_WORDS: usize = 4;
const DISAMBIGUATION_MARKER: &str = "(disambiguation)";

/// One article as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: u64,
    pub title: String,
    pub body: String,
    #[serde(default)]
    pub outlinks: Vec<u64>,
}

/// A tokenized article.
#[derive(Debug, Clone, PartialEq)]
pub struct Article {
    pub id: u64,
    pub title: String,
    pub body_tokens: Vec<String>,
    pub outlinks: BTreeSet<u64>,
}

impl Article {
    pub fn from_record(record: ArticleRecord) -> Self {
        Article {
            id: record.id,
            body_tokens: tokenize(&record.body),
            title: record.title,
            outlinks: record.outlinks.into_iter().collect(),
        }
    }

    pub fn to_record(&self) -> ArticleRecord {
        ArticleRecord {
            id: self.id,
            title: self.title.clone(),
            body: self.body_tokens.join(" "),
            outlinks: self.outlinks.iter().copied().collect(),
        }
    }
}

/// Splits text into lowercase tokens.
///
/// Rules, applied to each whitespace-separated chunk after lowercasing:
///
/// 1. A chunk with no alphanumeric character becomes one token per character.
/// 2. Otherwise, non-alphanumeric characters before the first and after the
///    last alphanumeric character are detached, one token each.
/// 3. Everything in between stays together, so internal periods, hyphens and
///    apostrophes are kept (`state-of-the-art`, `don't`).
/// 4. If the kept core already contains a period, one trailing period stays
///    attached (`u.s.`, `e.g.`).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        push_chunk(&chunk.to_lowercase(), &mut out);
    }
    out
}

fn push_chunk(chunk: &str, out: &mut Vec<String>) {
    let Some((start, _)) = chunk.char_indices().find(|(_, c)| c.is_alphanumeric()) else {
        out.extend(chunk.chars().map(String::from));
        return;
    };
    let (last, last_char) = chunk
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .expect("chunk has an alphanumeric character");
    let mut end = last + last_char.len_utf8();
    if chunk[start..end].contains('.') && chunk[end..].starts_with('.') {
        end += 1;
    }
    out.extend(chunk[..start].chars().map(String::from));
    out.push(chunk[start..end].to_string());
    out.extend(chunk[end..].chars().map(String::from));
}

pub fn is_disambiguation(title: &str) -> bool {
    title
        .trim_end()
        .to_lowercase()
        .ends_with(DISAMBIGUATION_MARKER)
}

/// Drops disambiguation pages and articles whose body has fewer than
/// `min_body_tokens` tokens. Order is preserved.
pub fn filter_articles<I>(articles: I, min_body_tokens: usize) -> impl Iterator<Item = Article>
where
    I: IntoIterator<Item = Article>,
{
    articles
        .into_iter()
        .filter(move |a| a.body_tokens.len() >= min_body_tokens && !is_disambiguation(&a.title))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconVariant {
    /// Full lowercase titles; keys of the document embedding table.
    DocEmbedding,
    /// Titles with a trailing parenthetical removed, tokenized; these are
    /// the spans collapsed into single tokens for skip-gram training.
    WordEmbedding,
}

/// Removes one trailing parenthesized span, e.g.
/// `"Democratic Party (United States)"` becomes `"Democratic Party"`.
/// Titles that are entirely parenthesized are returned unchanged.
pub fn strip_trailing_parenthetical(title: &str) -> &str {
    let trimmed = title.trim_end();
    if !trimmed.ends_with(')') {
        return trimmed;
    }
    let mut depth = 0usize;
    for (i, c) in trimmed.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' => {
                depth -= 1;
                if depth == 0 {
                    let head = trimmed[..i].trim_end();
                    return if head.is_empty() { trimmed } else { head };
                }
            }
            _ => {}
        }
    }
    trimmed
}

/// The lexicon key of `title` under `variant`.
pub fn normalize_title(title: &str, variant: LexiconVariant) -> String {
    match variant {
        LexiconVariant::DocEmbedding => title
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" "),
        LexiconVariant::WordEmbedding => tokenize(strip_trailing_parenthetical(title)).join(" "),
    }
}

/// Space-joined word form of a title, as matched in running text.
pub fn word_form(title: &str) -> String {
    normalize_title(title, LexiconVariant::WordEmbedding)
}

/// Single-token spelling of a multi-word form: spaces become underscores.
pub fn title_token(form: &str) -> String {
    form.split_whitespace().collect::<Vec<_>>().join("_")
}

/// Normalized titles and the articles they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TitleLexicon {
    pub variant: LexiconVariant,
    pub max_title_words: usize,
    pub entries: BTreeMap<String, BTreeSet<u64>>,
}

impl TitleLexicon {
    pub fn new(variant: LexiconVariant, max_title_words: usize) -> Self {
        TitleLexicon {
            variant,
            max_title_words,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, title: &str) -> bool {
        self.entries.contains_key(title)
    }

    pub fn article_ids(&self, title: &str) -> Option<&BTreeSet<u64>> {
        self.entries.get(title)
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Adds `title` of article `id`. Returns false when the title is
    /// rejected (empty, too long, or unusable under this variant).
    pub fn insert(&mut self, title: &str, id: u64) -> bool {
        let key = normalize_title(title, self.variant);
        let words = key.split_whitespace().count();
        if words == 0 || words > self.max_title_words {
            return false;
        }
        if self.variant == LexiconVariant::WordEmbedding && key.contains(['(', ')']) {
            return false;
        }
        self.entries.entry(key).or_default().insert(id);
        true
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (title, ids) in &self.entries {
            let ids: Vec<String> = ids.iter().map(u64::to_string).collect();
            writeln!(out, "{}\t{}", title, ids.join(","))?;
        }
        out.flush()
    }

    pub fn read_from<R: Read>(
        input: R,
        variant: LexiconVariant,
        max_title_words: usize,
        path: &Path,
    ) -> Result<Self> {
        let mut lexicon = TitleLexicon::new(variant, max_title_words);
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (title, ids) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, i + 1, "expected title<TAB>ids"))?;
            let ids = ids
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<BTreeSet<_>, _>>()
                .map_err(|e| Error::parse(path, i + 1, format!("bad article id: {e}")))?;
            if ids.is_empty() {
                return Err(Error::parse(path, i + 1, "title without article ids"));
            }
            lexicon.entries.entry(title.to_string()).or_default().extend(ids);
        }
        Ok(lexicon)
    }

    pub fn read(path: &Path, variant: LexiconVariant, max_title_words: usize) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(file, variant, max_title_words, path)
    }
}

pub fn build_title_lexicon<'a, I>(articles: I, variant: LexiconVariant) -> TitleLexicon
where
    I: IntoIterator<Item = &'a Article>,
{
    build_title_lexicon_with(articles, variant, DEFAULT_MAX_TITLE_WORDS)
}

pub fn build_title_lexicon_with<'a, I>(
    articles: I,
    variant: LexiconVariant,
    max_title_words: usize,
) -> TitleLexicon
where
    I: IntoIterator<Item = &'a Article>,
{
    let mut lexicon = TitleLexicon::new(variant, max_title_words);
    for a in articles {
        lexicon.insert(&a.title, a.id);
    }
    lexicon
}

/// Greedy leftmost-longest replacement of multi-word lexicon titles by
/// underscore-joined tokens.
#[derive(Debug, Clone)]
pub struct TitleCollapser {
    phrases: HashSet<String>,
    first_words: HashSet<String>,
    max_words: usize,
}

impl TitleCollapser {
    pub fn new(lexicon: &TitleLexicon) -> Self {
        let mut phrases = HashSet::new();
        let mut first_words = HashSet::new();
        let mut max_words = 0;
        for title in lexicon.titles() {
            let words: Vec<&str> = title.split(' ').collect();
            if words.len() < 2 {
                continue;
            }
            max_words = max_words.max(words.len());
            first_words.insert(words[0].to_string());
            phrases.insert(title.to_string());
        }
        TitleCollapser {
            phrases,
            first_words,
            max_words,
        }
    }

    pub fn collapse(&self, tokens: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        while i < tokens.len() {
            let mut matched = 0;
            if self.first_words.contains(&tokens[i]) {
                let longest = self.max_words.min(tokens.len() - i);
                for len in (2..=longest).rev() {
                    if self.phrases.contains(&tokens[i..i + len].join(" ")) {
                        matched = len;
                        break;
                    }
                }
            }
            if matched > 0 {
                out.push(tokens[i..i + matched].join("_"));
                i += matched;
            } else {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
        out
    }
}

pub fn collapse_titles(body_tokens: &[String], lexicon: &TitleLexicon) -> Vec<String> {
    TitleCollapser::new(lexicon).collapse(body_tokens)
}

pub fn parse_articles<R: BufRead>(input: R, path: &Path) -> Result<Vec<ArticleRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ArticleRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        if !seen.insert(record.id) {
            return Err(Error::parse(
                path,
                i + 1,
                format!("duplicate article id {}", record.id),
            ));
        }
        records.push(record);
    }
    Ok(records)
}

/// Reads and tokenizes an article file. Tokenization runs on the current
/// rayon pool; output order matches file order.
pub fn read_articles(path: &Path) -> Result<Vec<Article>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let records = parse_articles(BufReader::new(file), path)?;
    Ok(records.into_par_iter().map(Article::from_record).collect())
}

pub fn write_articles<W: Write>(mut out: W, articles: &[Article]) -> std::io::Result<()> {
    for a in articles {
        let line = serde_json::to_string(&a.to_record()).map_err(std::io::Error::other)?;
        writeln!(out, "{line}")?;
    }
    out.flush()
}
