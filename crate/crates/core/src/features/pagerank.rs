//! PageRank by power iteration over the article link graph.
//!
//! With damping `d`, `n` nodes, out-degree `deg(u)` and dangling set `D`:
//!
//! ```text
//! x'(v) = (1 - d) / n + d · ( Σ_{u→v} x(u) / deg(u) + Σ_{u∈D} x(u) / n )
//! ```
//!
//! Iteration stops when the L1 change drops below `tol` or after `max_iter`
//! rounds. Scores always sum to one.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Article, TitleLexicon};
use crate::error::{Error, Result};

/// Directed graph over article ids. Node order is the insertion order of
/// ids; edges to ids outside the node set are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGraph {
    nodes: Vec<u64>,
    index: HashMap<u64, usize>,
    out: Vec<Vec<usize>>,
}

impl LinkGraph {
    /// Builds a graph from node ids and directed edges. Duplicate edges are
    /// collapsed; self-links are kept.
    pub fn new(nodes: impl IntoIterator<Item = u64>, edges: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut g = LinkGraph {
            nodes: Vec::new(),
            index: HashMap::new(),
            out: Vec::new(),
        };
        for id in nodes {
            if let std::collections::hash_map::Entry::Vacant(e) = g.index.entry(id) {
                e.insert(g.nodes.len());
                g.nodes.push(id);
                g.out.push(Vec::new());
            }
        }
        for (s, t) in edges {
            if let (Some(&si), Some(&ti)) = (g.index.get(&s), g.index.get(&t)) {
                g.out[si].push(ti);
            }
        }
        for targets in &mut g.out {
            targets.sort_unstable();
            targets.dedup();
        }
        g
    }

    pub fn from_articles(articles: &[Article]) -> Self {
        LinkGraph::new(
            articles.iter().map(|a| a.id),
            articles
                .iter()
                .flat_map(|a| a.outlinks.iter().map(move |&t| (a.id, t))),
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[u64] {
        &self.nodes
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl PageRankConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::Config("damping must be in [0, 1)".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config("tol must be positive and max_iter at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub scores: BTreeMap<u64, f64>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub residual: f64,
    pub converged: bool,
}

pub fn pagerank(graph: &LinkGraph, cfg: &PageRankConfig) -> Result<PageRank> {
    cfg.validate()?;
    let n = graph.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let nf = n as f64;
    let d = cfg.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n)
            .filter(|&u| graph.out[u].is_empty())
            .map(|u| x[u])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|v| *v = base);
        for (u, targets) in graph.out.iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let share = d * x[u] / targets.len() as f64;
            for &t in targets {
                next[t] += share;
            }
        }
        // renormalize against rounding drift
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < cfg.tol {
            break;
        }
    }
    Ok(PageRank {
        scores: graph.nodes.iter().copied().zip(x).collect(),
        iterations,
        residual,
        converged: residual < cfg.tol,
    })
}

/// PageRank of a label: the highest score among the articles the label's
/// normalized title maps to.
pub fn title_pagerank(label: &str, lexicon: &TitleLexicon, scores: &BTreeMap<u64, f64>) -> Result<f64> {
    let ids = lexicon
        .article_ids(label)
        .ok_or_else(|| Error::UnknownTitle(label.to_string()))?;
    ids.iter()
        .filter_map(|id| scores.get(id).copied())
        .reduce(f64::max)
        .ok_or_else(|| Error::UnknownTitle(label.to_string()))
}

/// Two columns, `article_id<TAB>score`, one article per line, no header.
pub fn write_scores<W: Write>(mut out: W, scores: &BTreeMap<u64, f64>) -> std::io::Result<()> {
    for (id, s) in scores {
        writeln!(out, "{id}\t{s}")?;
    }
    out.flush()
}

pub fn read_scores_from<R: Read>(input: R, path: &Path) -> Result<BTreeMap<u64, f64>> {
    let mut scores = BTreeMap::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = line
            .split_once('\t')
            .and_then(|(a, b)| Some((a.trim().parse::<u64>().ok()?, b.trim().parse::<f64>().ok()?)));
        let (id, s) = parsed.ok_or_else(|| Error::parse(path, i + 1, "expected article_id<TAB>score"))?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::parse(path, i + 1, "score must be positive"));
        }
        if scores.insert(id, s).is_some() {
            return Err(Error::parse(path, i + 1, format!("duplicate article id {id}")));
        }
    }
    Ok(scores)
}

pub fn read_scores(path: &Path) -> Result<BTreeMap<u64, f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores_from(file, path)
}
