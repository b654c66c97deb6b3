//! Automatic labelling of topic-model topics with article titles.
//!
//! The pipeline has two halves. Candidate generation scores every title of a
//! preprocessed article corpus against a topic's top terms using document
//! embeddings (dbow) and title-token word embeddings (skip-gram), and keeps
//! the best titles by the sum of both relevances. Candidate ranking then
//! reorders that pool with a linear support-vector regressor over four cheap
//! features: a letter-trigram rank, PageRank of the title's article, lexical
//! overlap with the topic, and label length.
//!
//! Modules map onto pipeline stages:
//!
//! - [`corpus`]: tokenization, article filtering, title lexicons, title collapsing
//! - [`embeddings`]: skip-gram and dbow training, the embedding text format
//! - [`generation`]: relevance scores and candidate generation
//! - [`features`]: letter trigrams, PageRank, lexical features
//! - [`ranker`]: epsilon-insensitive SVR and reranking
//! - [`evaluation`]: top-1 average, nDCG, cross-validation and ablation

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod generation;
pub mod ranker;
pub mod tsv;

pub use corpus::{Article, ArticleRecord, LexiconVariant, TitleLexicon};
pub use embeddings::{cosine, EmbeddingTable, TableKind, TrainConfig};
pub use error::{Error, Result};
pub use evaluation::{Condition, Dataset, EvaluationReport, ReportRow};
pub use features::{FeatureVector, LinkGraph, TrigramDistribution};
pub use generation::{CandidateLabel, Topic};
pub use ranker::{GoldRating, RegressionModel, SvrConfig};
