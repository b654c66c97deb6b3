//! Negative-sampling machinery shared by skip-gram and dbow.
//!
//! For an input vector `v`, a true output `u_0` and noise outputs
//! `u_1..u_k`, the loss is
//!
//! ```text
//! L = -ln σ(u_0·v) - Σ_j ln σ(-u_j·v)
//! ```
//!
//! Training takes one gradient step on `L` per (input, output) pair.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};

use num_traits::Float;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

fn sigmoid<F: Float>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

/// `ln(1 + e^x)` without overflow.
fn softplus<F: Float>(x: F) -> F {
    x.max(F::zero()) + (-x.abs()).exp().ln_1p()
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `t - σ(u·v)` where `t` is 1 for the true output and 0 for noise; the
/// negated derivative of the loss with respect to `u·v`.
fn output_coefficient<F: Float>(input: &[F], output: &[F], positive: bool) -> F {
    let target = if positive { F::one() } else { F::zero() };
    target - sigmoid(dot(input, output))
}

/// Loss of one input against its outputs; `positive[j]` marks true outputs.
pub fn negative_sampling_loss<F: Float>(input: &[F], outputs: &[&[F]], positive: &[bool]) -> F {
    outputs
        .iter()
        .zip(positive)
        .fold(F::zero(), |acc, (u, &pos)| {
            let f = dot(input, u);
            // -ln σ(f) = softplus(-f), -ln σ(-f) = softplus(f)
            acc + if pos { softplus(-f) } else { softplus(f) }
        })
}

/// Analytic gradient of [`negative_sampling_loss`] with respect to the input
/// and to each output.
pub fn negative_sampling_gradients<F: Float>(
    input: &[F],
    outputs: &[&[F]],
    positive: &[bool],
) -> (Vec<F>, Vec<Vec<F>>) {
    let mut grad_input = vec![F::zero(); input.len()];
    let mut grad_outputs = Vec::with_capacity(outputs.len());
    for (u, &pos) in outputs.iter().zip(positive) {
        let g = output_coefficient(input, u, pos);
        for (gi, &uj) in grad_input.iter_mut().zip(u.iter()) {
            *gi = *gi - g * uj;
        }
        grad_outputs.push(input.iter().map(|&x| -g * x).collect());
    }
    (grad_input, grad_outputs)
}

/// One descent step for a single output row. The input's update is
/// accumulated into `input_step` and applied by the caller once all outputs
/// of this input have been visited, so every output sees the same input.
pub fn step_output<F: Float>(
    input: &[F],
    output: &mut [F],
    positive: bool,
    lr: F,
    input_step: &mut [F],
) {
    let g = output_coefficient(input, output, positive) * lr;
    for (s, &u) in input_step.iter_mut().zip(output.iter()) {
        *s = *s + g * u;
    }
    for (u, &x) in output.iter_mut().zip(input) {
        *u = *u + g * x;
    }
}

/// Token inventory with corpus counts, ordered by count descending then
/// token ascending.
#[derive(Debug, Clone)]
pub struct Vocab {
    pub tokens: Vec<String>,
    pub counts: Vec<u64>,
    pub index: HashMap<String, u32>,
    pub total: u64,
}

impl Vocab {
    pub fn build<'a, I>(tokens: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        let mut seen_any = false;
        for t in tokens {
            seen_any = true;
            *counts.entry(t).or_default() += 1;
        }
        if !seen_any {
            return Err(Error::EmptyCorpus);
        }
        let mut kept: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count.max(1))
            .collect();
        if kept.is_empty() {
            return Err(Error::EmptyVocabulary(min_count as usize));
        }
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
        let counts: Vec<u64> = kept.iter().map(|&(_, c)| c).collect();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocab {
            total: counts.iter().sum(),
            tokens,
            counts,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn ids<'a, I>(&self, tokens: I) -> Vec<u32>
    where
        I: IntoIterator<Item = &'a str>,
    {
        tokens
            .into_iter()
            .filter_map(|t| self.index.get(t).copied())
            .collect()
    }

    /// Probability of keeping each occurrence of a token under frequent-word
    /// sub-sampling: `(sqrt(c / (t·N)) + 1) · t·N / c`, capped at 1. With
    /// `t = 1` every occurrence is kept.
    pub fn keep_probabilities(&self, threshold: f64) -> Vec<f64> {
        let scaled = threshold * self.total as f64;
        self.counts
            .iter()
            .map(|&c| {
                let c = c as f64;
                (((c / scaled).sqrt() + 1.0) * scaled / c).min(1.0)
            })
            .collect()
    }

    /// Noise distribution proportional to count^0.75.
    pub fn noise_distribution(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(self.counts.iter().map(|&c| (c as f64).powf(0.75)))
            .expect("vocabulary is non-empty with positive counts")
    }
}

/// Drops occurrences at random according to `keep`.
pub fn subsample<R: Rng>(ids: &[u32], keep: &[f64], rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    for &id in ids {
        let p = keep[id as usize];
        if p >= 1.0 || rng.random::<f64>() < p {
            out.push(id);
        }
    }
}

/// Row-major f32 matrix that several training threads may update at once.
/// Rows are read and written component-wise with relaxed atomics; racing
/// updates to the same row can overwrite each other, as in lock-free SGD.
pub struct SharedMatrix {
    dim: usize,
    data: Box<[AtomicU32]>,
}

impl SharedMatrix {
    pub fn from_vec(values: Vec<f32>, dim: usize) -> Self {
        assert!(dim > 0 && values.len().is_multiple_of(dim));
        SharedMatrix {
            dim,
            data: values.into_iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
        }
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self::from_vec(vec![0.0; rows * dim], dim)
    }

    pub fn load(&self, row: usize, out: &mut [f32]) {
        let base = row * self.dim;
        for (o, a) in out.iter_mut().zip(&self.data[base..base + self.dim]) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    pub fn store(&self, row: usize, values: &[f32]) {
        let base = row * self.dim;
        for (a, v) in self.data[base..base + self.dim].iter().zip(values) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
            .into_vec()
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()))
            .collect()
    }
}

/// Scratch buffers for one worker.
pub struct Scratch {
    pub input: Vec<f32>,
    pub output: Vec<f32>,
    pub input_step: Vec<f32>,
}

impl Scratch {
    pub fn new(dim: usize) -> Self {
        Scratch {
            input: vec![0.0; dim],
            output: vec![0.0; dim],
            input_step: vec![0.0; dim],
        }
    }
}

/// Trains input row `input_row` of `inputs` to predict `target` against
/// `negatives` noise draws. Noise draws equal to the target are skipped.
#[allow(clippy::too_many_arguments)]
pub fn train_pair<R: Rng>(
    inputs: &SharedMatrix,
    input_row: usize,
    outputs: &SharedMatrix,
    target: u32,
    negatives: usize,
    noise: &WeightedIndex<f64>,
    lr: f32,
    rng: &mut R,
    s: &mut Scratch,
) {
    inputs.load(input_row, &mut s.input);
    s.input_step.iter_mut().for_each(|x| *x = 0.0);
    for d in 0..=negatives {
        let (word, positive) = if d == 0 {
            (target, true)
        } else {
            let w = noise.sample(rng) as u32;
            if w == target {
                continue;
            }
            (w, false)
        };
        outputs.load(word as usize, &mut s.output);
        step_output(&s.input, &mut s.output, positive, lr, &mut s.input_step);
        outputs.store(word as usize, &s.output);
    }
    for (x, d) in s.input.iter_mut().zip(&s.input_step) {
        *x += d;
    }
    inputs.store(input_row, &s.input);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vocab_order_and_min_count() {
        let text = "b a c a b a d".split(' ');
        let v = Vocab::build(text, 2).unwrap();
        assert_eq!(v.tokens, vec!["a", "b"]);
        assert_eq!(v.counts, vec![3, 2]);
        assert_eq!(v.total, 5);
        assert!(matches!(
            Vocab::build("a b".split(' '), 5),
            Err(Error::EmptyVocabulary(5))
        ));
        assert!(matches!(
            Vocab::build(std::iter::empty(), 1),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn threshold_one_keeps_everything() {
        let text: Vec<String> = (0..500).map(|i| format!("w{}", i % 7)).collect();
        let v = Vocab::build(text.iter().map(String::as_str), 1).unwrap();
        let keep = v.keep_probabilities(1.0);
        assert!(keep.iter().all(|&p| p == 1.0));
        let ids = v.ids(text.iter().map(String::as_str));
        let mut out = Vec::new();
        subsample(&ids, &keep, &mut ChaCha8Rng::seed_from_u64(3), &mut out);
        assert_eq!(out, ids);
    }

    #[test]
    fn small_threshold_drops_frequent_words() {
        let mut text = vec!["the"; 10_000];
        text.extend(["rare"; 3]);
        let v = Vocab::build(text.iter().copied(), 1).unwrap();
        let keep = v.keep_probabilities(1e-3);
        assert!(keep[0] < 0.5);
        assert_eq!(keep[1], 1.0);
    }

    #[test]
    fn step_is_gradient_descent() {
        let input = [0.1f64, -0.2, 0.3];
        let out0 = [0.05f64, 0.4, -0.1];
        let out1 = [-0.3f64, 0.2, 0.2];
        let lr = 0.01;
        let (gi, go) = negative_sampling_gradients(&input, &[&out0, &out1], &[true, false]);
        let mut step = [0.0; 3];
        let mut u0 = out0;
        let mut u1 = out1;
        step_output(&input, &mut u0, true, lr, &mut step);
        step_output(&input, &mut u1, false, lr, &mut step);
        for k in 0..3 {
            assert!((u0[k] - (out0[k] - lr * go[0][k])).abs() < 1e-15);
            assert!((u1[k] - (out1[k] - lr * go[1][k])).abs() < 1e-15);
            assert!((step[k] - (-lr * gi[k])).abs() < 1e-15);
        }
    }
}
