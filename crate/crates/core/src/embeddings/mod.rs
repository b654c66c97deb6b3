//! Dense embedding tables, their text format, and the trainers that fill them.
//!
//! The text format is the common word2vec one: a header line
//! `"<vocab_size> <dim>"` followed by one line per token, the token then
//! `dim` space-separated decimals. Floats are written in shortest
//! round-trip form, so export followed by import is exact.

mod config;
pub mod sgns;
mod train;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use config::TrainConfig;
pub use train::{train_dbow, train_skipgram, DbowModel};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Word and title-token vectors from the skip-gram model.
    WordFromWordModel,
    /// Word vectors learnt jointly by the dbow model.
    WordFromDocModel,
    /// Document (title) vectors from the dbow model.
    Document,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    kind: TableKind,
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(kind: TableKind, dim: usize) -> Self {
        EmbeddingTable {
            kind,
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        }
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), self.row(i)))
    }

    /// Appends a row. Tokens must be unique, non-empty and free of
    /// whitespace; components must be finite.
    pub fn insert(&mut self, token: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if token.is_empty() || token.contains(char::is_whitespace) {
            return Err(Error::Config(format!(
                "embedding token {token:?} is empty or contains whitespace"
            )));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(format!(
                "embedding for {token:?} has a non-finite component"
            )));
        }
        if self.index.contains_key(token) {
            return Err(Error::DuplicateToken(token.to_string()));
        }
        self.index.insert(token.to_string(), self.tokens.len());
        self.tokens.push(token.to_string());
        self.vectors.extend_from_slice(vector);
        Ok(())
    }

    /// A table holding only the rows whose token satisfies `keep`, in the
    /// original order.
    pub fn filtered(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        let mut out = EmbeddingTable::new(self.kind, self.dim);
        for (t, v) in self.iter() {
            if keep(t) {
                out.insert(t, v).expect("rows of a valid table stay valid");
            }
        }
        out
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        let mut line = String::new();
        for (t, v) in self.iter() {
            line.clear();
            line.push_str(t);
            for x in v {
                line.push(' ');
                line.push_str(&x.to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()
    }

    pub fn read_from<R: Read>(input: R, kind: TableKind, path: &Path) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, 1, "missing header")),
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parsed: Option<(usize, usize)> = match fields.as_slice() {
            [n, d] => n.parse().ok().zip(d.parse().ok()),
            _ => None,
        };
        let (n, dim) = parsed.ok_or_else(|| {
            Error::parse(path, 1, format!("malformed header {header:?}, expected \"vocab_size dim\""))
        })?;
        if dim == 0 {
            return Err(Error::parse(path, 1, "dimension must be positive"));
        }
        let mut table = EmbeddingTable::new(kind, dim);
        let mut buf = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-blank line has a field");
            buf.clear();
            for p in parts {
                let x: f32 = p
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, format!("bad float {p:?}")))?;
                buf.push(x);
            }
            table.insert(token, &buf).map_err(|e| match e {
                Error::DimensionMismatch { expected, found } => Error::parse(
                    path,
                    lineno,
                    format!("dimension mismatch: expected {expected}, found {found}"),
                ),
                other => Error::parse(path, lineno, other.to_string()),
            })?;
        }
        if table.len() != n {
            return Err(Error::parse(
                path,
                1,
                format!("header declares {n} rows, found {}", table.len()),
            ));
        }
        Ok(table)
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn import(path: &Path, kind: TableKind) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(file, kind, path)
    }
}

/// Cosine similarity, accumulated in f64.
pub fn cosine<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Into<f64>,
    B: Copy + Into<f64>,
{
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.into(), y.into());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}
