use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters shared by the skip-gram and dbow trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub subsample_threshold: f64,
    pub epochs: usize,
    pub min_count: u64,
    pub seed: u64,
    pub initial_learning_rate: f64,
    pub final_learning_rate: f64,
    /// Sample the effective window uniformly from `1..=window` per center token.
    pub dynamic_window: bool,
    /// dbow only: interleave skip-gram updates so the word vectors are trained.
    pub train_words: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::desk_skipgram()
    }
}

impl TrainConfig {
    /// Full-scale dbow settings: 300 dimensions, window 15, 5 negatives,
    /// sub-sampling at 1e-5, 20 epochs.
    pub fn paper_dbow() -> Self {
        TrainConfig {
            dim: 300,
            window: 15,
            negative_samples: 5,
            subsample_threshold: 1e-5,
            epochs: 20,
            min_count: 5,
            seed: 1,
            initial_learning_rate: 0.025,
            final_learning_rate: 0.0001,
            dynamic_window: true,
            train_words: true,
        }
    }

    /// Full-scale skip-gram settings: 300 dimensions, window 5, 5 negatives,
    /// sub-sampling at 1e-5, 100 epochs.
    pub fn paper_skipgram() -> Self {
        TrainConfig {
            window: 5,
            epochs: 100,
            ..TrainConfig::paper_dbow()
        }
    }

    /// Small settings for corpora of a few hundred articles.
    pub fn desk_dbow() -> Self {
        TrainConfig {
            dim: 50,
            subsample_threshold: 1e-3,
            epochs: 100,
            min_count: 1,
            ..TrainConfig::paper_dbow()
        }
    }

    pub fn desk_skipgram() -> Self {
        TrainConfig {
            dim: 50,
            subsample_threshold: 1e-3,
            epochs: 200,
            min_count: 1,
            ..TrainConfig::paper_skipgram()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim < 1 {
            return fail("dim must be at least 1");
        }
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.subsample_threshold > 0.0 && self.subsample_threshold <= 1.0) {
            return fail("subsample_threshold must be in (0, 1]");
        }
        if !(self.initial_learning_rate > 0.0 && self.initial_learning_rate.is_finite()) {
            return fail("initial_learning_rate must be positive");
        }
        if !(self.final_learning_rate >= 0.0
            && self.final_learning_rate <= self.initial_learning_rate)
        {
            return fail("final_learning_rate must be in [0, initial_learning_rate]");
        }
        Ok(())
    }
}
