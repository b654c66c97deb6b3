//! Pointwise learn-to-rank with a linear epsilon-insensitive SVR.
//!
//! Features are z-scored, then the model minimizes
//!
//! ```text
//! ½‖w‖² + C · Σ_i max(0, |w·x_i + b − y_i| − ε)
//! ```
//!
//! by stochastic subgradient descent in the Pegasos form: with
//! `λ = 1 / (C·n)` the objective is rescaled to `λ/2‖w‖² + (1/n)Σ loss`, and
//! step `t` (counted over all epochs) uses learning rate `1/(λt)`. The bias
//! is not regularized. Sample order is shuffled per epoch from a seeded RNG.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Feature, FeatureVector};
use crate::tsv;

const N_FEATURES: usize = Feature::ALL.len();

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldRating {
    pub topic_id: String,
    pub label: String,
    pub mean_rating: f64,
    pub n_annotations: u32,
}

/// Gold table: header `topic_id label mean_rating n_annotations`.
pub fn read_gold(path: &Path) -> Result<Vec<GoldRating>> {
    let rows: Vec<GoldRating> = tsv::read(path)?;
    let mut seen = BTreeSet::new();
    for (i, r) in rows.iter().enumerate() {
        if !(0.0..=3.0).contains(&r.mean_rating) {
            return Err(Error::parse(path, i + 2, "mean_rating must be within [0, 3]"));
        }
        if r.n_annotations < 1 {
            return Err(Error::parse(path, i + 2, "n_annotations must be at least 1"));
        }
        if !seen.insert((r.topic_id.as_str(), r.label.as_str())) {
            return Err(Error::parse(
                path,
                i + 2,
                format!("duplicate rating for ({}, {})", r.topic_id, r.label),
            ));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrConfig {
    pub c: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Features the model may use; the others are ignored.
    pub features: Vec<Feature>,
    /// Predictions closer than this are treated as tied when reranking.
    pub tie_tolerance: f64,
}

impl Default for SvrConfig {
    fn default() -> Self {
        SvrConfig {
            c: 1.0,
            epsilon: 0.1,
            epochs: 5000,
            seed: 1,
            features: Feature::ALL.to_vec(),
            tie_tolerance: 1e-4,
        }
    }
}

impl SvrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config("C must be positive".into()));
        }
        if !(self.epsilon >= 0.0) || self.epochs == 0 || !(self.tie_tolerance >= 0.0) {
            return Err(Error::Config(
                "epsilon and tie_tolerance must be non-negative and epochs positive".into(),
            ));
        }
        Ok(())
    }

    pub fn without(&self, feature: Feature) -> SvrConfig {
        SvrConfig {
            features: self.features.iter().copied().filter(|&f| f != feature).collect(),
            ..self.clone()
        }
    }

    fn mask(&self) -> [bool; N_FEATURES] {
        let mut m = [false; N_FEATURES];
        for f in &self.features {
            m[f.index()] = true;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub fitted: bool,
    pub weights: [f64; N_FEATURES],
    pub bias: f64,
    pub feature_means: [f64; N_FEATURES],
    pub feature_stds: [f64; N_FEATURES],
    pub config: SvrConfig,
}

impl RegressionModel {
    pub fn unfitted(config: SvrConfig) -> Self {
        RegressionModel {
            fitted: false,
            weights: [0.0; N_FEATURES],
            bias: 0.0,
            feature_means: [0.0; N_FEATURES],
            feature_stds: [1.0; N_FEATURES],
            config,
        }
    }

    fn standardize(&self, fv: &FeatureVector) -> [f64; N_FEATURES] {
        let mask = self.config.mask();
        let raw = fv.values();
        let mut x = [0.0; N_FEATURES];
        for k in 0..N_FEATURES {
            if mask[k] {
                x[k] = (raw[k] - self.feature_means[k]) / self.feature_stds[k];
            }
        }
        x
    }

    fn score(&self, x: &[f64; N_FEATURES]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn write_to<W: Write>(&self, mut out: W, path: &Path) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        writeln!(out).map_err(|e| Error::io(path, e))
    }

    pub fn read_from<R: Read>(input: R, path: &Path) -> Result<Self> {
        let model: RegressionModel =
            serde_json::from_reader(input).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if model.feature_stds.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::parse(path, 0, "feature_stds must be positive"));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file), path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(file), path)
    }
}

/// Fits the SVR. Needs at least two pairs; constant features get unit
/// standard deviation.
pub fn fit(pairs: &[(FeatureVector, f64)], config: &SvrConfig) -> Result<RegressionModel> {
    config.validate()?;
    if pairs.len() < 2 {
        return Err(Error::DegenerateTrainingSet(format!(
            "{} training pairs, need at least 2",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(fv, y)| !y.is_finite() || fv.values().iter().any(|v| !v.is_finite())) {
        return Err(Error::DegenerateTrainingSet("non-finite feature or target".into()));
    }
    let n = pairs.len() as f64;
    let mut model = RegressionModel::unfitted(config.clone());
    for k in 0..N_FEATURES {
        let mean = pairs.iter().map(|(fv, _)| fv.values()[k]).sum::<f64>() / n;
        let var = pairs
            .iter()
            .map(|(fv, _)| (fv.values()[k] - mean).powi(2))
            .sum::<f64>()
            / n;
        model.feature_means[k] = mean;
        model.feature_stds[k] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    }
    let xs: Vec<[f64; N_FEATURES]> = pairs.iter().map(|(fv, _)| model.standardize(fv)).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(_, y)| y).collect();

    let lambda = 1.0 / (config.c * n);
    let mut w = [0.0; N_FEATURES];
    let mut b = ys.iter().sum::<f64>() / n;
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut t = 0u64;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = &xs[i];
            let r = b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - ys[i];
            let s = if r > config.epsilon {
                1.0
            } else if r < -config.epsilon {
                -1.0
            } else {
                0.0
            };
            let shrink = 1.0 - 1.0 / t as f64;
            for k in 0..N_FEATURES {
                w[k] = shrink * w[k] - eta * s * x[k];
            }
            b -= eta * s;
        }
    }
    model.weights = w;
    model.bias = b;
    model.fitted = true;
    Ok(model)
}

pub fn predict(model: &RegressionModel, fv: &FeatureVector) -> Result<f64> {
    if !model.fitted {
        return Err(Error::UnfittedModel);
    }
    Ok(model.score(&model.standardize(fv)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedLabel {
    pub label: String,
    pub score: f64,
    pub features: FeatureVector,
}

/// Orders labels by score, best first. Scores within `tolerance` of their
/// neighbour in score order form one tie group, ordered by letter-trigram
/// rank and then by label.
pub fn order_by_score(mut items: Vec<RankedLabel>, tolerance: f64) -> Vec<RankedLabel> {
    items.sort_by(|a, b| b.score.total_cmp(&a.score));
    let tie_break = |a: &RankedLabel, b: &RankedLabel| {
        a.features
            .letter_trigram_rank
            .cmp(&b.features.letter_trigram_rank)
            .then_with(|| a.label.cmp(&b.label))
    };
    let mut start = 0;
    for i in 1..=items.len() {
        if i == items.len() || items[i - 1].score - items[i].score > tolerance {
            items[start..i].sort_by(tie_break);
            start = i;
        }
    }
    items
}

/// Reorders candidates by predicted rating.
pub fn rerank(model: &RegressionModel, candidates: &[(String, FeatureVector)]) -> Result<Vec<RankedLabel>> {
    let items = candidates
        .iter()
        .map(|(label, fv)| {
            Ok(RankedLabel {
                label: label.clone(),
                score: predict(model, fv)?,
                features: *fv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(order_by_score(items, model.config.tie_tolerance))
}

/// Pairs each label with its features, failing on the first label without.
pub fn attach_features<S: AsRef<str>>(
    topic_id: &str,
    labels: &[S],
    features: &HashMap<String, FeatureVector>,
) -> Result<Vec<(String, FeatureVector)>> {
    labels
        .iter()
        .map(|l| {
            let l = l.as_ref();
            features
                .get(l)
                .map(|fv| (l.to_string(), *fv))
                .ok_or_else(|| Error::MissingFeatures {
                    topic: topic_id.to_string(),
                    label: l.to_string(),
                })
        })
        .collect()
}
