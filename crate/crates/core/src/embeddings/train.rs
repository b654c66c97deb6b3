use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sgns::{subsample, train_pair, Scratch, SharedMatrix, Vocab};
use super::{EmbeddingTable, TableKind, TrainConfig};
use crate::error::{Error, Result};

/// Document vectors and the word vectors trained alongside them.
#[derive(Debug, Clone)]
pub struct DbowModel {
    pub documents: EmbeddingTable,
    pub words: EmbeddingTable,
}

fn stream_seed(seed: u64, epoch: usize, worker: usize) -> u64 {
    // splitmix64 finalizer over the packed coordinates
    let mut z = seed
        ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (worker as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9).rotate_left(32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_rows(rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f32> {
    (0..rows * dim)
        .map(|_| (rng.random::<f32>() - 0.5) / dim as f32)
        .collect()
}

struct Shared<'a> {
    cfg: &'a TrainConfig,
    keep: Vec<f64>,
    noise: WeightedIndex<f64>,
    words_in: SharedMatrix,
    words_out: SharedMatrix,
    processed: AtomicU64,
    total_work: u64,
}

impl Shared<'_> {
    fn new<'a>(cfg: &'a TrainConfig, vocab: &Vocab, per_epoch: u64) -> Shared<'a> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Shared {
            cfg,
            keep: vocab.keep_probabilities(cfg.subsample_threshold),
            noise: vocab.noise_distribution(),
            words_in: SharedMatrix::from_vec(random_rows(vocab.len(), cfg.dim, &mut rng), cfg.dim),
            words_out: SharedMatrix::zeros(vocab.len(), cfg.dim),
            processed: AtomicU64::new(0),
            total_work: (per_epoch * cfg.epochs as u64).max(1),
        }
    }

    /// Linear decay over all token positions of all epochs.
    fn learning_rate(&self, done: u64) -> f32 {
        let progress = (done as f64 / self.total_work as f64).min(1.0);
        let (a, b) = (self.cfg.initial_learning_rate, self.cfg.final_learning_rate);
        (a - (a - b) * progress) as f32
    }

    fn window<R: Rng>(&self, rng: &mut R) -> usize {
        if self.cfg.dynamic_window {
            rng.random_range(1..=self.cfg.window)
        } else {
            self.cfg.window
        }
    }

    fn train_window<R: Rng>(&self, kept: &[u32], pos: usize, lr: f32, rng: &mut R, s: &mut Scratch) {
        let b = self.window(rng);
        let lo = pos.saturating_sub(b);
        let hi = (pos + b).min(kept.len() - 1);
        for c in lo..=hi {
            if c != pos {
                train_pair(
                    &self.words_in,
                    kept[pos] as usize,
                    &self.words_out,
                    kept[c],
                    self.cfg.negative_samples,
                    &self.noise,
                    lr,
                    rng,
                    s,
                );
            }
        }
    }
}

/// Runs `work(chunk, rng)` over `items` for every epoch, splitting each
/// epoch into `workers` contiguous chunks. With one worker everything runs
/// on the calling thread and the result is bitwise reproducible.
fn run_epochs<T: Sync>(
    items: &[T],
    epochs: usize,
    workers: usize,
    seed: u64,
    work: impl Fn(&[T], &mut ChaCha8Rng) + Sync,
) {
    let workers = workers.max(1).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    for epoch in 0..epochs {
        if workers == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, epoch, 0));
            work(items, &mut rng);
            continue;
        }
        std::thread::scope(|scope| {
            for (w, part) in items.chunks(chunk).enumerate() {
                let work = &work;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, epoch, w));
                    work(part, &mut rng);
                });
            }
        });
    }
}

fn word_table(vocab: &Vocab, values: Vec<f32>, dim: usize, kind: TableKind) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new(kind, dim);
    for (i, t) in vocab.tokens.iter().enumerate() {
        table.insert(t, &values[i * dim..(i + 1) * dim])?;
    }
    Ok(table)
}

/// Skip-gram with negative sampling over sentences whose multi-word titles
/// are already collapsed into single tokens.
pub fn train_skipgram(
    sentences: &[Vec<String>],
    cfg: &TrainConfig,
    workers: usize,
) -> Result<EmbeddingTable> {
    cfg.validate()?;
    let vocab = Vocab::build(sentences.iter().flatten().map(String::as_str), cfg.min_count)?;
    let encoded: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| vocab.ids(s.iter().map(String::as_str)))
        .filter(|s| !s.is_empty())
        .collect();
    let per_epoch: u64 = encoded.iter().map(|s| s.len() as u64).sum();
    let shared = Shared::new(cfg, &vocab, per_epoch);

    run_epochs(&encoded, cfg.epochs, workers, cfg.seed, |part, rng| {
        let mut s = Scratch::new(cfg.dim);
        let mut kept = Vec::new();
        for sentence in part {
            let base = shared.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            subsample(sentence, &shared.keep, rng, &mut kept);
            let n = kept.len();
            for pos in 0..n {
                let lr = shared.learning_rate(base + (pos * sentence.len() / n) as u64);
                shared.train_window(&kept, pos, lr, rng, &mut s);
            }
        }
    });

    word_table(
        &vocab,
        shared.words_in.into_vec(),
        cfg.dim,
        TableKind::WordFromWordModel,
    )
}

/// Distributed bag-of-words paragraph vectors. Each document vector is
/// trained to predict the words of its document; documents sharing a tag
/// share a vector. With `cfg.train_words` the word vectors are trained by
/// interleaved skip-gram updates over the same text.
pub fn train_dbow(
    documents: &[(String, Vec<String>)],
    cfg: &TrainConfig,
    workers: usize,
) -> Result<DbowModel> {
    cfg.validate()?;
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let vocab = Vocab::build(
        documents.iter().flat_map(|(_, t)| t.iter().map(String::as_str)),
        cfg.min_count,
    )?;
    let mut tags: Vec<&str> = Vec::new();
    let mut tag_index: HashMap<&str, usize> = HashMap::new();
    let encoded: Vec<(usize, Vec<u32>)> = documents
        .iter()
        .map(|(tag, tokens)| {
            let idx = *tag_index.entry(tag.as_str()).or_insert_with(|| {
                tags.push(tag.as_str());
                tags.len() - 1
            });
            (idx, vocab.ids(tokens.iter().map(String::as_str)))
        })
        .collect();
    let per_epoch: u64 = encoded.iter().map(|(_, s)| s.len() as u64).sum();
    let shared = Shared::new(cfg, &vocab, per_epoch);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, usize::MAX, 0));
    let docs_in = SharedMatrix::from_vec(random_rows(tags.len(), cfg.dim, &mut rng), cfg.dim);

    run_epochs(&encoded, cfg.epochs, workers, cfg.seed, |part, rng| {
        let mut s = Scratch::new(cfg.dim);
        let mut kept = Vec::new();
        for (tag, words) in part {
            let base = shared.processed.fetch_add(words.len() as u64, Ordering::Relaxed);
            subsample(words, &shared.keep, rng, &mut kept);
            let n = kept.len();
            for pos in 0..n {
                let lr = shared.learning_rate(base + (pos * words.len() / n) as u64);
                if cfg.train_words {
                    shared.train_window(&kept, pos, lr, rng, &mut s);
                }
                train_pair(
                    &docs_in,
                    *tag,
                    &shared.words_out,
                    kept[pos],
                    cfg.negative_samples,
                    &shared.noise,
                    lr,
                    rng,
                    &mut s,
                );
            }
        }
    });

    let doc_values = docs_in.into_vec();
    let mut doc_table = EmbeddingTable::new(TableKind::Document, cfg.dim);
    for (i, tag) in tags.iter().enumerate() {
        doc_table.insert(tag, &doc_values[i * cfg.dim..(i + 1) * cfg.dim])?;
    }
    Ok(DbowModel {
        documents: doc_table,
        words: word_table(
            &vocab,
            shared.words_in.into_vec(),
            cfg.dim,
            TableKind::WordFromDocModel,
        )?,
    })
}
