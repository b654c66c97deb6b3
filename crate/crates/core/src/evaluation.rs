//! Evaluation protocol: top-1 average rating and nDCG@{1,3,5} for the
//! unsupervised baseline, in-domain cross-validation, cross-domain
//! training, and the gold upper bound; plus candidate-quality statistics
//! and feature ablation.
//!
//! DCG uses the Järvelin–Kekäläinen form by default: the gain of rank 1 is
//! undiscounted and rank `i ≥ 2` is divided by `log2(i)`. Gains are mean
//! ratings, or `2^r − 1` with [`DcgVariant::Exponential`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{Feature, FeatureRow, FeatureVector};
use crate::generation::Topic;
use crate::ranker::{fit, rerank, GoldRating, SvrConfig};
use crate::tsv;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcgVariant {
    #[default]
    Linear,
    Exponential,
}

impl DcgVariant {
    fn gain(self, rating: f64) -> f64 {
        match self {
            DcgVariant::Linear => rating,
            DcgVariant::Exponential => rating.exp2() - 1.0,
        }
    }
}

/// DCG of the first `k` gains (ratings in system order).
pub fn dcg(ratings: &[f64], k: usize, variant: DcgVariant) -> f64 {
    ratings
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &r)| {
            let g = variant.gain(r);
            if i == 0 {
                g
            } else {
                g / ((i + 1) as f64).log2()
            }
        })
        .sum()
}

/// nDCG@k of ratings listed in system order, normalized by the DCG of the
/// same ratings sorted descending. Defined as 1 when the ideal DCG is 0.
pub fn ndcg(ratings: &[f64], k: usize, variant: DcgVariant) -> f64 {
    let mut ideal = ratings.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let best = dcg(&ideal, k, variant);
    if best == 0.0 {
        return 1.0;
    }
    (dcg(ratings, k, variant) / best).clamp(0.0, 1.0)
}

/// Gold ratings keyed by (topic id, label).
#[derive(Debug, Clone, Default)]
pub struct GoldIndex {
    ratings: HashMap<(String, String), f64>,
}

impl GoldIndex {
    pub fn new(gold: &[GoldRating]) -> Self {
        GoldIndex {
            ratings: gold
                .iter()
                .map(|g| ((g.topic_id.clone(), g.label.clone()), g.mean_rating))
                .collect(),
        }
    }

    pub fn get(&self, topic: &str, label: &str) -> Result<f64> {
        self.ratings
            .get(&(topic.to_string(), label.to_string()))
            .copied()
            .ok_or_else(|| Error::MissingGold {
                topic: topic.to_string(),
                label: label.to_string(),
            })
    }

    fn ratings_of<S: AsRef<str>>(&self, topic: &str, ranking: &[S]) -> Result<Vec<f64>> {
        ranking.iter().map(|l| self.get(topic, l.as_ref())).collect()
    }
}

/// Mean gold rating of each topic's rank-1 label.
pub fn top1_average<S: AsRef<str>>(rankings: &[(String, Vec<S>)], gold: &GoldIndex) -> Result<f64> {
    if rankings.is_empty() {
        return Err(Error::EmptyInput("no rankings to evaluate".into()));
    }
    let mut sum = 0.0;
    for (topic, ranking) in rankings {
        let first = ranking
            .first()
            .ok_or_else(|| Error::EmptyInput(format!("topic {topic:?} has an empty ranking")))?;
        sum += gold.get(topic, first.as_ref())?;
    }
    Ok(sum / rankings.len() as f64)
}

/// nDCG@k of one topic's system ranking. The ideal ordering is the gold
/// ordering of the same candidate set.
pub fn ndcg_at_k<S: AsRef<str>>(
    topic: &str,
    ranking: &[S],
    gold: &GoldIndex,
    k: usize,
    variant: DcgVariant,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    Ok(ndcg(&gold.ratings_of(topic, ranking)?, k, variant))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelledCandidate {
    pub label: String,
    pub features: FeatureVector,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicInstance {
    pub topic_id: String,
    pub domain: String,
    pub candidates: Vec<LabelledCandidate>,
}

/// Rated candidates with features, grouped by topic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub topics: Vec<TopicInstance>,
}

impl Dataset {
    /// Joins feature rows with gold ratings and topic domains. Candidates
    /// without a gold rating are left out, and topics left with no rated
    /// candidate are dropped.
    pub fn from_parts(topics: &[Topic], features: &[FeatureRow], gold: &[GoldRating]) -> Result<Self> {
        let domain_of: HashMap<&str, &str> =
            topics.iter().map(|t| (t.id.as_str(), t.domain.as_str())).collect();
        let gold = GoldIndex::new(gold);
        let mut out = Dataset::default();
        let mut slot: HashMap<&str, usize> = HashMap::new();
        let mut unrated = 0usize;
        for row in features {
            let domain = domain_of.get(row.topic_id.as_str()).ok_or_else(|| Error::InvalidTopic {
                id: row.topic_id.clone(),
                reason: "feature rows reference a topic missing from the topics file".into(),
            })?;
            let Ok(rating) = gold.get(&row.topic_id, &row.label) else {
                unrated += 1;
                continue;
            };
            let i = *slot.entry(row.topic_id.as_str()).or_insert_with(|| {
                out.topics.push(TopicInstance {
                    topic_id: row.topic_id.clone(),
                    domain: domain.to_string(),
                    candidates: Vec::new(),
                });
                out.topics.len() - 1
            });
            out.topics[i].candidates.push(LabelledCandidate {
                label: row.label.clone(),
                features: row.features(),
                rating,
            });
        }
        if unrated > 0 {
            log::warn!("{unrated} candidates have no gold rating and were left out");
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn domains(&self) -> Vec<String> {
        self.topics
            .iter()
            .map(|t| t.domain.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn in_domains(&self, domains: &[String]) -> Dataset {
        Dataset {
            topics: self
                .topics
                .iter()
                .filter(|t| domains.contains(&t.domain))
                .cloned()
                .collect(),
        }
    }

    pub fn pairs(&self) -> Vec<(FeatureVector, f64)> {
        self.topics
            .iter()
            .flat_map(|t| t.candidates.iter().map(|c| (c.features, c.rating)))
            .collect()
    }
}

/// Averages over a set of evaluated topics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub top1_avg: f64,
    pub ndcg_1: f64,
    pub ndcg_3: f64,
    pub ndcg_5: f64,
    pub n_topics: usize,
}

/// Metrics of per-topic rating lists, each in system order.
pub fn metrics_of(rated_rankings: &[Vec<f64>], variant: DcgVariant) -> Metrics {
    let n = rated_rankings.len().max(1) as f64;
    let mean = |f: &dyn Fn(&[f64]) -> f64| rated_rankings.iter().map(|r| f(r)).sum::<f64>() / n;
    Metrics {
        top1_avg: mean(&|r| r.first().copied().unwrap_or(0.0)),
        ndcg_1: mean(&|r| ndcg(r, 1, variant)),
        ndcg_3: mean(&|r| ndcg(r, 3, variant)),
        ndcg_5: mean(&|r| ndcg(r, 5, variant)),
        n_topics: rated_rankings.len(),
    }
}

fn baseline_order(t: &TopicInstance) -> Vec<f64> {
    let mut c: Vec<&LabelledCandidate> = t.candidates.iter().collect();
    c.sort_by(|a, b| {
        a.features
            .letter_trigram_rank
            .cmp(&b.features.letter_trigram_rank)
            .then_with(|| a.label.cmp(&b.label))
    });
    c.iter().map(|c| c.rating).collect()
}

fn ideal_order(t: &TopicInstance) -> Vec<f64> {
    let mut r: Vec<f64> = t.candidates.iter().map(|c| c.rating).collect();
    r.sort_by(|a, b| b.total_cmp(a));
    r
}

fn model_order(model: &crate::ranker::RegressionModel, t: &TopicInstance) -> Result<Vec<f64>> {
    let cands: Vec<(String, FeatureVector)> = t
        .candidates
        .iter()
        .map(|c| (c.label.clone(), c.features))
        .collect();
    let rating: HashMap<&str, f64> = t.candidates.iter().map(|c| (c.label.as_str(), c.rating)).collect();
    Ok(rerank(model, &cands)?
        .iter()
        .map(|r| rating[r.label.as_str()])
        .collect())
}

/// Unsupervised letter-trigram ranking.
pub fn baseline(data: &Dataset, variant: DcgVariant) -> Metrics {
    let orders: Vec<Vec<f64>> = data.topics.iter().map(baseline_order).collect();
    metrics_of(&orders, variant)
}

/// Perfect ranking of the candidates: top-1 is each topic's best rating and
/// every nDCG is 1.
pub fn upper_bound(data: &Dataset, variant: DcgVariant) -> Metrics {
    let orders: Vec<Vec<f64>> = data.topics.iter().map(ideal_order).collect();
    metrics_of(&orders, variant)
}

/// Fits on `train` and evaluates the reranked `test` topics.
pub fn fit_and_evaluate(train: &Dataset, test: &Dataset, svr: &SvrConfig, variant: DcgVariant) -> Result<Metrics> {
    let model = fit(&train.pairs(), svr)?;
    let orders = test
        .topics
        .iter()
        .map(|t| model_order(&model, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(metrics_of(&orders, variant))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub folds: usize,
    pub runs: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            runs: 10,
            seed: 1,
        }
    }
}

/// Test-fold index of each topic for one run: topics are shuffled with a
/// seed derived from `(seed, run)` and dealt into `folds` contiguous blocks
/// whose sizes differ by at most one.
pub fn fold_assignments(n_topics: usize, folds: usize, seed: u64, run: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_topics).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((run as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    order.shuffle(&mut rng);
    let mut fold_of = vec![0; n_topics];
    for (pos, &topic) in order.iter().enumerate() {
        fold_of[topic] = pos * folds / n_topics;
    }
    fold_of
}

/// In-domain protocol: `folds`-fold cross-validation over topics, repeated
/// `runs` times with different partitions. Each topic is scored once per
/// run; metrics are averaged over all (run, topic) evaluations.
pub fn cross_validate(data: &Dataset, cv: &CvConfig, svr: &SvrConfig, variant: DcgVariant) -> Result<Metrics> {
    let n = data.len();
    if cv.folds < 2 || cv.runs < 1 {
        return Err(Error::Config("cross-validation needs folds >= 2 and runs >= 1".into()));
    }
    if n < cv.folds {
        return Err(Error::TooFewTopics {
            domain: data.domains().join("+"),
            found: n,
            folds: cv.folds,
        });
    }
    let jobs: Vec<(usize, usize)> = (0..cv.runs)
        .flat_map(|r| (0..cv.folds).map(move |f| (r, f)))
        .collect();
    let assignments: Vec<Vec<usize>> = (0..cv.runs)
        .map(|r| fold_assignments(n, cv.folds, cv.seed, r))
        .collect();
    let per_job: Vec<Vec<(usize, Vec<f64>)>> = jobs
        .par_iter()
        .map(|&(run, fold)| {
            let fold_of = &assignments[run];
            let train = Dataset {
                topics: (0..n)
                    .filter(|&i| fold_of[i] != fold)
                    .map(|i| data.topics[i].clone())
                    .collect(),
            };
            let model = fit(&train.pairs(), svr)?;
            (0..n)
                .filter(|&i| fold_of[i] == fold)
                .map(|i| Ok((i, model_order(&model, &data.topics[i])?)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut per_run: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; n]; cv.runs];
    for (&(run, _), results) in jobs.iter().zip(per_job) {
        for (i, order) in results {
            per_run[run][i] = Some(order);
        }
    }
    let all: Vec<Vec<f64>> = per_run
        .into_iter()
        .flatten()
        .map(|o| o.expect("folds partition the topics"))
        .collect();
    let mut m = metrics_of(&all, variant);
    m.n_topics = n;
    Ok(m)
}

/// Trains on every topic of `train_domains` and tests on `test_domain`.
pub fn cross_domain(
    data: &Dataset,
    train_domains: &[String],
    test_domain: &str,
    svr: &SvrConfig,
    variant: DcgVariant,
) -> Result<Metrics> {
    if train_domains.iter().any(|d| d == test_domain) {
        return Err(Error::OverlappingDomains(vec![test_domain.to_string()]));
    }
    let train = data.in_domains(train_domains);
    let test = data.in_domains(&[test_domain.to_string()]);
    if test.is_empty() {
        return Err(Error::EmptyInput(format!("no topics in domain {test_domain:?}")));
    }
    fit_and_evaluate(&train, &test, svr, variant)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    Baseline,
    InDomain,
    CrossDomain(Vec<String>),
    UpperBound,
    Ablation(Feature),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Baseline => f.write_str("baseline"),
            Condition::InDomain => f.write_str("in_domain"),
            Condition::CrossDomain(src) => write!(f, "cross_domain:{}", src.join("+")),
            Condition::UpperBound => f.write_str("upper_bound"),
            Condition::Ablation(feat) => write!(f, "ablation:-{feat}"),
        }
    }
}

impl Condition {
    fn title(&self) -> String {
        match self {
            Condition::Baseline => "Baseline".into(),
            Condition::InDomain => "In-Domain".into(),
            Condition::CrossDomain(src) if src.len() == 1 => format!("Cross-domain: {}", src[0]),
            Condition::CrossDomain(src) => format!("Cross-domain: All {}", src.len()),
            Condition::UpperBound => "Upper Bound".into(),
            Condition::Ablation(feat) => format!("Ablation: -{feat}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub domain: String,
    pub condition: Condition,
    pub metrics: Metrics,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportRecord {
    test_domain: String,
    training: String,
    top1_avg: f64,
    ndcg_1: f64,
    ndcg_3: f64,
    ndcg_5: f64,
    n_topics: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
}

impl EvaluationReport {
    pub fn find(&self, domain: &str, condition: &Condition) -> Option<&Metrics> {
        self.rows
            .iter()
            .find(|r| r.domain == domain && &r.condition == condition)
            .map(|r| &r.metrics)
    }

    /// Machine-readable form: header `test_domain training top1_avg ndcg_1
    /// ndcg_3 ndcg_5 n_topics`, one row per (domain, condition).
    pub fn write_tsv<W: std::io::Write>(&self, out: W, path: &Path) -> Result<()> {
        let records: Vec<ReportRecord> = self
            .rows
            .iter()
            .map(|r| ReportRecord {
                test_domain: r.domain.clone(),
                training: r.condition.to_string(),
                top1_avg: r.metrics.top1_avg,
                ndcg_1: r.metrics.ndcg_1,
                ndcg_3: r.metrics.ndcg_3,
                ndcg_5: r.metrics.ndcg_5,
                n_topics: r.metrics.n_topics,
            })
            .collect();
        tsv::write_to(out, &records, path)
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:<28} {:>9} {:>7} {:>7} {:>7} {:>7}",
            "Test Domain", "Training", "Top-1 Avg", "nDCG-1", "nDCG-3", "nDCG-5", "Topics"
        )?;
        let mut last = "";
        for r in &self.rows {
            let domain = if r.domain == last { "" } else { r.domain.as_str() };
            last = &r.domain;
            writeln!(
                f,
                "{:<12} {:<28} {:>9.2} {:>7.2} {:>7.2} {:>7.2} {:>7}",
                domain,
                r.condition.title(),
                r.metrics.top1_avg,
                r.metrics.ndcg_1,
                r.metrics.ndcg_3,
                r.metrics.ndcg_5,
                r.metrics.n_topics
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub cv: CvConfig,
    pub dcg: DcgVariant,
}

/// The full results table: for each test domain, baseline, in-domain CV,
/// each single-domain and all-other-domains cross-domain model, and the
/// upper bound. In-domain rows are skipped for domains with fewer topics
/// than folds.
pub fn evaluate(data: &Dataset, cfg: &EvalConfig, svr: &SvrConfig) -> Result<EvaluationReport> {
    let domains = data.domains();
    let mut report = EvaluationReport::default();
    for domain in &domains {
        let test = data.in_domains(std::slice::from_ref(domain));
        let mut push = |condition, metrics| {
            report.rows.push(ReportRow {
                domain: domain.clone(),
                condition,
                metrics,
            })
        };
        push(Condition::Baseline, baseline(&test, cfg.dcg));
        match cross_validate(&test, &cfg.cv, svr, cfg.dcg) {
            Ok(m) => push(Condition::InDomain, m),
            Err(Error::TooFewTopics { found, folds, .. }) => {
                log::warn!("skipping in-domain CV for {domain}: {found} topics < {folds} folds")
            }
            Err(e) => return Err(e),
        }
        let others: Vec<String> = domains.iter().filter(|d| *d != domain).cloned().collect();
        for other in &others {
            let src = vec![other.clone()];
            push(
                Condition::CrossDomain(src.clone()),
                cross_domain(data, &src, domain, svr, cfg.dcg)?,
            );
        }
        if others.len() > 1 {
            push(
                Condition::CrossDomain(others.clone()),
                cross_domain(data, &others, domain, svr, cfg.dcg)?,
            );
        }
        push(Condition::UpperBound, upper_bound(&test, cfg.dcg));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub domain: String,
    pub removed: Feature,
    pub top1_all: f64,
    pub top1_without: f64,
    pub delta: f64,
}

/// In-domain top-1 average with each active feature removed in turn.
pub fn ablation(data: &Dataset, cfg: &EvalConfig, svr: &SvrConfig) -> Result<Vec<AblationRow>> {
    if svr.features.len() < 2 {
        return Err(Error::Config("ablation needs at least two features".into()));
    }
    let mut rows = Vec::new();
    for domain in data.domains() {
        let test = data.in_domains(std::slice::from_ref(&domain));
        let all = cross_validate(&test, &cfg.cv, svr, cfg.dcg)?.top1_avg;
        for &feature in &svr.features {
            let without = cross_validate(&test, &cfg.cv, &svr.without(feature), cfg.dcg)?.top1_avg;
            rows.push(AblationRow {
                domain: domain.clone(),
                removed: feature,
                top1_all: all,
                top1_without: without,
                delta: without - all,
            });
        }
    }
    Ok(rows)
}

pub fn write_ablation<W: std::io::Write>(out: W, rows: &[AblationRow], path: &Path) -> Result<()> {
    tsv::write_to(out, rows, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicQuality {
    pub topic_id: String,
    pub domain: String,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub n_candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainQuality {
    pub domain: String,
    pub n_topics: usize,
    pub mean_of_means: f64,
    pub mean_of_max: f64,
    pub mean_of_min: f64,
}

/// Per-topic mean, maximum and minimum candidate rating, and per-domain
/// averages of those three. Topics without a known domain are grouped
/// under `"unknown"`.
pub fn candidate_quality_stats(
    gold: &[GoldRating],
    domain_of: &HashMap<String, String>,
) -> (Vec<TopicQuality>, Vec<DomainQuality>) {
    let mut by_topic: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for g in gold {
        by_topic.entry(g.topic_id.as_str()).or_default().push(g.mean_rating);
    }
    let topics: Vec<TopicQuality> = by_topic
        .into_iter()
        .map(|(id, r)| TopicQuality {
            topic_id: id.to_string(),
            domain: domain_of.get(id).cloned().unwrap_or_else(|| "unknown".into()),
            mean: r.iter().sum::<f64>() / r.len() as f64,
            max: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: r.iter().copied().fold(f64::INFINITY, f64::min),
            n_candidates: r.len(),
        })
        .collect();
    let mut by_domain: BTreeMap<&str, Vec<&TopicQuality>> = BTreeMap::new();
    for t in &topics {
        by_domain.entry(t.domain.as_str()).or_default().push(t);
    }
    let domains = by_domain
        .into_iter()
        .map(|(d, ts)| {
            let n = ts.len() as f64;
            DomainQuality {
                domain: d.to_string(),
                n_topics: ts.len(),
                mean_of_means: ts.iter().map(|t| t.mean).sum::<f64>() / n,
                mean_of_max: ts.iter().map(|t| t.max).sum::<f64>() / n,
                mean_of_min: ts.iter().map(|t| t.min).sum::<f64>() / n,
            }
        })
        .collect();
    (topics, domains)
}

/// One-sided paired t-test that `a` is greater than `b` on average.
/// Returns the t statistic and its p-value.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Config("paired t-test needs two equal-length samples of size >= 2".into()));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        let p = if mean > 0.0 { 0.0 } else { 1.0 };
        return Ok((mean.signum() * f64::INFINITY, p));
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::Config(e.to_string()))?;
    Ok((t, 1.0 - dist.cdf(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold(rows: &[(&str, &str, f64)]) -> GoldIndex {
        GoldIndex::new(
            &rows
                .iter()
                .map(|&(t, l, r)| GoldRating {
                    topic_id: t.into(),
                    label: l.into(),
                    mean_rating: r,
                    n_annotations: 5,
                })
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn top1_examples() {
        let g = gold(&[("t1", "a", 2.4), ("t1", "b", 1.0), ("t2", "c", 2.6), ("t2", "d", 0.3)]);
        let r = vec![
            ("t1".to_string(), vec!["a", "b"]),
            ("t2".to_string(), vec!["c", "d"]),
        ];
        assert!((top1_average(&r, &g).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(top1_average(&r[..1], &g).unwrap(), 2.4);
        let missing = vec![("t1".to_string(), vec!["zzz"])];
        assert!(matches!(
            top1_average(&missing, &g),
            Err(Error::MissingGold { ref label, .. }) if label == "zzz"
        ));
    }

    #[test]
    fn ndcg_examples() {
        let g = gold(&[("t", "a", 3.0), ("t", "b", 2.0), ("t", "c", 1.0), ("t", "x", 1.5)]);
        for k in 1..=5 {
            assert_eq!(ndcg_at_k("t", &["a", "b", "c"], &g, k, DcgVariant::Linear).unwrap(), 1.0);
        }
        let half = ndcg(&[1.5, 3.0], 1, DcgVariant::Linear);
        assert!((half - 0.5).abs() < 1e-12);
        let rev = ndcg_at_k("t", &["c", "b", "a"], &g, 3, DcgVariant::Linear).unwrap();
        let hand = (1.0 + 2.0 / 1.0 + 3.0 / 3f64.log2()) / (3.0 + 2.0 / 1.0 + 1.0 / 3f64.log2());
        assert!((rev - hand).abs() < 1e-12);
        assert!((rev - 0.868913).abs() < 1e-6);
        assert_eq!(ndcg(&[0.0, 0.0], 3, DcgVariant::Linear), 1.0);
        assert!(ndcg_at_k("t", &["a"], &g, 0, DcgVariant::Linear).is_err());
    }

    #[test]
    fn exponential_gains() {
        let r = ndcg(&[1.0, 3.0], 2, DcgVariant::Exponential);
        let hand = (1.0 + 7.0 / 2f64.log2()) / (7.0 + 1.0 / 2f64.log2());
        assert!((r - hand).abs() < 1e-12);
    }

    #[test]
    fn quality_stats() {
        let rows: Vec<GoldRating> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&r| GoldRating {
                topic_id: "t".into(),
                label: format!("l{r}"),
                mean_rating: r,
                n_annotations: 3,
            })
            .collect();
        let domains = HashMap::from([("t".to_string(), "news".to_string())]);
        let (topics, per_domain) = candidate_quality_stats(&rows, &domains);
        assert_eq!((topics[0].mean, topics[0].max, topics[0].min), (2.0, 3.0, 1.0));
        assert_eq!(per_domain[0].domain, "news");
        let flat: Vec<GoldRating> = rows
            .iter()
            .map(|g| GoldRating { mean_rating: 1.5, ..g.clone() })
            .collect();
        let (topics, _) = candidate_quality_stats(&flat, &domains);
        assert_eq!((topics[0].mean, topics[0].max, topics[0].min), (1.5, 1.5, 1.5));
    }

    #[test]
    fn t_test_direction() {
        let a = [2.0, 2.1, 1.9, 2.2, 2.05];
        let b = [1.0, 1.2, 0.9, 1.1, 1.0];
        let (t, p) = paired_t_test(&a, &b).unwrap();
        assert!(t > 0.0 && p < 0.001);
        let (_, p) = paired_t_test(&b, &a).unwrap();
        assert!(p > 0.99);
    }

    #[test]
    fn folds_partition_topics() {
        for (n, folds) in [(10, 10), (23, 10), (45, 10), (7, 3)] {
            for run in 0..3 {
                let a = fold_assignments(n, folds, 9, run);
                let mut sizes = vec![0; folds];
                for &f in &a {
                    sizes[f] += 1;
                }
                assert!(sizes.iter().all(|&s| s == n / folds || s == n / folds + 1));
            }
        }
        assert_ne!(fold_assignments(40, 10, 1, 0), fold_assignments(40, 10, 1, 1));
        assert_eq!(fold_assignments(40, 10, 1, 0), fold_assignments(40, 10, 1, 0));
    }
}
