//! Synthetic inputs for the pipeline benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netl_core::generation::{doc_key, word_key, TitleEmbeddings};
use netl_core::{EmbeddingTable, FeatureVector, LinkGraph, TableKind, Topic};

const VOCAB: [&str; 24] = [
    "data", "model", "network", "system", "graph", "learning", "memory", "signal", "energy", "market",
    "policy", "protein", "cell", "planet", "orbit", "river", "climate", "music", "language", "court",
    "engine", "virus", "crystal", "library",
];

/// Random embedding tables over `n_titles` titles plus the shared vocabulary.
pub struct SyntheticTables {
    pub documents: EmbeddingTable,
    pub doc_words: EmbeddingTable,
    pub words: EmbeddingTable,
    pub titles: Vec<String>,
}

impl SyntheticTables {
    pub fn new(n_titles: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = |rng: &mut ChaCha8Rng| -> Vec<f32> { (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let mut documents = EmbeddingTable::new(TableKind::Document, dim);
        let mut doc_words = EmbeddingTable::new(TableKind::WordFromDocModel, dim);
        let mut words = EmbeddingTable::new(TableKind::WordFromWordModel, dim);
        for w in VOCAB {
            doc_words.insert(w, &v(&mut rng)).expect("fixed dim");
            words.insert(w, &v(&mut rng)).expect("fixed dim");
        }
        let titles: Vec<String> = (0..n_titles).map(|i| format!("Title {i}")).collect();
        for t in &titles {
            documents.insert(&doc_key(t), &v(&mut rng)).expect("fixed dim");
            words.insert(&word_key(t), &v(&mut rng)).expect("fixed dim");
        }
        SyntheticTables {
            documents,
            doc_words,
            words,
            titles,
        }
    }

    pub fn view(&self) -> TitleEmbeddings<'_> {
        TitleEmbeddings {
            documents: &self.documents,
            doc_words: &self.doc_words,
            words: &self.words,
        }
    }
}

pub fn topic(n_terms: usize) -> Topic {
    Topic::new("bench", "synthetic", &VOCAB[..n_terms.min(VOCAB.len())])
}

/// Labels of one to four vocabulary words.
pub fn labels(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.random_range(1..=4);
            (0..len)
                .map(|_| VOCAB[rng.random_range(0..VOCAB.len())])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// A random graph where each node links to `out_degree` others.
pub fn link_graph(n: u64, out_degree: usize, seed: u64) -> LinkGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(u64, u64)> = (0..n)
        .flat_map(|s| (0..out_degree).map(move |_| s))
        .map(|s| (s, rng.random_range(0..n)))
        .collect();
    LinkGraph::new(0..n, edges)
}

/// Sentences drawn uniformly from the vocabulary.
pub fn sentences(n: usize, len: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..len).map(|_| VOCAB[rng.random_range(0..VOCAB.len())].to_string()).collect())
        .collect()
}

/// Training pairs with a noisy linear target.
pub fn training_pairs(n: usize, seed: u64) -> Vec<(FeatureVector, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let num_words = rng.random_range(1..=4);
            let fv = FeatureVector {
                letter_trigram_rank: rng.random_range(1..=19),
                pagerank: rng.random_range(1e-6..1e-3),
                topic_overlap: rng.random_range(0..=num_words),
                num_words,
            };
            let y = 1.0 + 0.4 * fv.topic_overlap as f64 - 0.03 * fv.letter_trigram_rank as f64
                + rng.random_range(-0.2..0.2);
            (fv, y)
        })
        .collect()
}
