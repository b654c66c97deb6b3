use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use netl_core::corpus::{
    build_title_lexicon_with, filter_articles, normalize_title, read_articles, write_articles,
    LexiconVariant, TitleCollapser,
};
use netl_core::embeddings::{train_dbow, train_skipgram};
use netl_core::evaluation::{self, candidate_quality_stats, Dataset};
use netl_core::features::{
    compute_features, group_by_topic, pagerank, read_feature_rows, read_scores, write_scores, FeatureRow,
};
use netl_core::generation::{candidate_rows, doc_key, read_topics, CandidatePool, CandidateRow, TitleEmbeddings};
use netl_core::ranker::{fit, read_gold, rerank};
use netl_core::{tsv, EmbeddingTable, Error, LinkGraph, RegressionModel, TableKind, TitleLexicon, Topic};

use crate::config::PipelineConfig;
use crate::io::{check_inputs, write_atomic};

fn doc_lexicon(cfg: &PipelineConfig) -> Result<TitleLexicon> {
    Ok(TitleLexicon::read(
        &cfg.paths.doc_lexicon,
        LexiconVariant::DocEmbedding,
        cfg.corpus.max_title_words,
    )?)
}

fn write_tsv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_atomic(path, |w| Ok(tsv::write_to(w, rows, path)?))
}

pub fn preprocess(cfg: &PipelineConfig) -> Result<()> {
    let p = &cfg.paths;
    check_inputs(&[&p.raw_articles])?;
    let all = read_articles(&p.raw_articles)?;
    let total = all.len();
    let kept: Vec<_> = filter_articles(all, cfg.corpus.min_body_tokens).collect();
    log::info!(
        "kept {} of {total} articles (min_body_tokens={})",
        kept.len(),
        cfg.corpus.min_body_tokens
    );
    if kept.is_empty() {
        return Err(Error::EmptyCorpus.into());
    }
    let max = cfg.corpus.max_title_words;
    let doc_lex = build_title_lexicon_with(&kept, LexiconVariant::DocEmbedding, max);
    let word_lex = build_title_lexicon_with(&kept, LexiconVariant::WordEmbedding, max);
    log::info!("lexicons: {} document titles, {} word titles", doc_lex.len(), word_lex.len());
    let collapser = TitleCollapser::new(&word_lex);
    let collapsed: Vec<Vec<String>> = kept
        .par_iter()
        .map(|a| collapser.collapse(&a.body_tokens))
        .collect();

    write_atomic(&p.articles, |w| Ok(write_articles(w, &kept)?))?;
    write_atomic(&p.doc_lexicon, |w| Ok(doc_lex.write_to(w)?))?;
    write_atomic(&p.word_lexicon, |w| Ok(word_lex.write_to(w)?))?;
    write_atomic(&p.collapsed, |w| {
        for line in &collapsed {
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    })
}

fn read_sentences(path: &Path) -> Result<Vec<Vec<String>>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(file)
        .lines()
        .map(|l| {
            let l = l.with_context(|| format!("reading {}", path.display()))?;
            Ok(l.split_whitespace().map(str::to_string).collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EmbeddingModel {
    Dbow,
    Skipgram,
    All,
}

pub fn train_embeddings(cfg: &PipelineConfig, which: EmbeddingModel, workers: usize) -> Result<()> {
    let p = &cfg.paths;
    if which != EmbeddingModel::Skipgram {
        check_inputs(&[&p.articles])?;
        log::info!("dbow: {:?}", cfg.dbow);
        let docs: Vec<(String, Vec<String>)> = read_articles(&p.articles)?
            .into_iter()
            .map(|a| {
                let tag = doc_key(&normalize_title(&a.title, LexiconVariant::DocEmbedding));
                (tag, a.body_tokens)
            })
            .collect();
        let model = train_dbow(&docs, &cfg.dbow, workers)?;
        write_atomic(&p.doc_vectors, |w| Ok(model.documents.write_to(w)?))?;
        write_atomic(&p.doc_word_vectors, |w| Ok(model.words.write_to(w)?))?;
    }
    if which != EmbeddingModel::Dbow {
        check_inputs(&[&p.collapsed])?;
        log::info!("skip-gram: {:?}", cfg.skipgram);
        let table = train_skipgram(&read_sentences(&p.collapsed)?, &cfg.skipgram, workers)?;
        write_atomic(&p.word_vectors, |w| Ok(table.write_to(w)?))?;
    }
    Ok(())
}

pub fn run_pagerank(cfg: &PipelineConfig) -> Result<()> {
    let p = &cfg.paths;
    check_inputs(&[&p.articles])?;
    let graph = LinkGraph::from_articles(&read_articles(&p.articles)?);
    log::info!("link graph: {} nodes, {} edges", graph.len(), graph.edge_count());
    let pr = pagerank(&graph, &cfg.pagerank)?;
    if pr.converged {
        log::info!("pagerank converged after {} iterations", pr.iterations);
    } else {
        log::warn!(
            "pagerank stopped after {} iterations with residual {:e}",
            pr.iterations,
            pr.residual
        );
    }
    write_atomic(&p.pagerank, |w| Ok(write_scores(w, &pr.scores)?))
}

fn generate_all(cfg: &PipelineConfig, topics: &[Topic]) -> Result<Vec<CandidateRow>> {
    let p = &cfg.paths;
    check_inputs(&[&p.doc_vectors, &p.doc_word_vectors, &p.word_vectors, &p.doc_lexicon])?;
    let documents = EmbeddingTable::import(&p.doc_vectors, TableKind::Document)?;
    let doc_words = EmbeddingTable::import(&p.doc_word_vectors, TableKind::WordFromDocModel)?;
    let words = EmbeddingTable::import(&p.word_vectors, TableKind::WordFromWordModel)?;
    let lexicon = doc_lexicon(cfg)?;
    let tables = TitleEmbeddings {
        documents: &documents,
        doc_words: &doc_words,
        words: &words,
    };
    let pool = CandidatePool::new(lexicon.titles(), tables);
    log::info!(
        "candidate pool: {} titles, {} skipped without vectors in both models",
        pool.len(),
        pool.skipped()
    );
    let mut rows = Vec::new();
    for topic in topics {
        match pool.generate(topic, &cfg.generation) {
            Ok(c) => rows.extend(candidate_rows(&topic.id, &c)),
            Err(Error::NoTermCoverage(id)) => log::warn!("topic {id}: no term has a vector; skipped"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(rows)
}

pub fn generate(cfg: &PipelineConfig) -> Result<()> {
    check_inputs(&[&cfg.paths.topics])?;
    let topics = read_topics(&cfg.paths.topics)?;
    let rows = generate_all(cfg, &topics)?;
    write_tsv(&cfg.paths.candidates, &rows)
}

fn features_for(cfg: &PipelineConfig, topics: &[Topic], candidates: &[CandidateRow]) -> Result<Vec<FeatureRow>> {
    let p = &cfg.paths;
    check_inputs(&[&p.doc_lexicon, &p.pagerank])?;
    let lexicon = doc_lexicon(cfg)?;
    let scores = read_scores(&p.pagerank)?;
    let by_id: HashMap<&str, &Topic> = topics.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut labels: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut order = Vec::new();
    for c in candidates {
        labels
            .entry(c.topic_id.as_str())
            .or_insert_with(|| {
                order.push(c.topic_id.as_str());
                Vec::new()
            })
            .push(c.label.as_str());
    }
    let mut rows = Vec::new();
    for id in order {
        let topic = by_id.get(id).ok_or_else(|| Error::InvalidTopic {
            id: id.to_string(),
            reason: "candidates reference a topic missing from the topics file".into(),
        })?;
        let topic = topic.truncated(cfg.generation.topic_terms);
        for (label, fv) in compute_features(&topic, &labels[id], &lexicon, &scores)? {
            rows.push(FeatureRow::new(id, &label, &fv));
        }
    }
    Ok(rows)
}

pub fn features(cfg: &PipelineConfig) -> Result<()> {
    let p = &cfg.paths;
    check_inputs(&[&p.topics, &p.candidates])?;
    let topics = read_topics(&p.topics)?;
    let candidates: Vec<CandidateRow> = tsv::read(&p.candidates)?;
    let rows = features_for(cfg, &topics, &candidates)?;
    write_tsv(&p.features, &rows)
}

pub fn train_ranker(cfg: &PipelineConfig) -> Result<()> {
    let p = &cfg.paths;
    check_inputs(&[&p.features, &p.gold])?;
    let rows = read_feature_rows(&p.features)?;
    let gold: HashMap<(String, String), f64> = read_gold(&p.gold)?
        .into_iter()
        .map(|g| ((g.topic_id, g.label), g.mean_rating))
        .collect();
    let pairs: Vec<_> = rows
        .iter()
        .filter_map(|r| {
            gold.get(&(r.topic_id.clone(), r.label.clone()))
                .map(|&y| (r.features(), y))
        })
        .collect();
    log::info!("{} of {} candidates have gold ratings", pairs.len(), rows.len());
    log::info!("ranker: {:?}", cfg.ranker);
    let model = fit(&pairs, &cfg.ranker)?;
    write_atomic(&p.model, |w| Ok(model.write_to(w, &p.model)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub topic_id: String,
    pub rank: usize,
    pub label: String,
    pub score: f64,
}

/// Ranked labels from precomputed features, or from the embedding tables,
/// lexicon and PageRank scores when no feature file is given.
pub fn label(cfg: &PipelineConfig, features: Option<&Path>) -> Result<()> {
    let p = &cfg.paths;
    check_inputs(&[&p.model])?;
    let model = RegressionModel::load(&p.model)?;
    let rows = match features {
        Some(f) => {
            check_inputs(&[f])?;
            read_feature_rows(f)?
        }
        None => {
            check_inputs(&[&p.topics])?;
            let topics = read_topics(&p.topics)?;
            let candidates = generate_all(cfg, &topics)?;
            features_for(cfg, &topics, &candidates)?
        }
    };
    let mut out = Vec::new();
    for (topic_id, cands) in group_by_topic(&rows) {
        for (i, r) in rerank(&model, &cands)?.into_iter().enumerate() {
            out.push(LabelRow {
                topic_id: topic_id.clone(),
                rank: i + 1,
                label: r.label,
                score: r.score,
            });
        }
    }
    write_tsv(&p.labels, &out)
}

fn dataset(cfg: &PipelineConfig) -> Result<(Dataset, Vec<Topic>, Vec<netl_core::GoldRating>)> {
    let p = &cfg.paths;
    check_inputs(&[&p.topics, &p.features, &p.gold])?;
    let topics = read_topics(&p.topics)?;
    let gold = read_gold(&p.gold)?;
    let data = Dataset::from_parts(&topics, &read_feature_rows(&p.features)?, &gold)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("no topic has rated candidates".into()).into());
    }
    Ok((data, topics, gold))
}

pub fn evaluate(cfg: &PipelineConfig) -> Result<()> {
    let (data, topics, gold) = dataset(cfg)?;
    log::info!("evaluation: {:?}; ranker: {:?}", cfg.evaluation, cfg.ranker);
    let report = evaluation::evaluate(&data, &cfg.evaluation, &cfg.ranker)?;
    let domains: HashMap<String, String> = topics.iter().map(|t| (t.id.clone(), t.domain.clone())).collect();
    let (per_topic, per_domain) = candidate_quality_stats(&gold, &domains);
    write_atomic(&cfg.paths.report, |w| Ok(report.write_tsv(w, &cfg.paths.report)?))?;
    write_tsv(&cfg.paths.quality, &per_topic)?;
    print!("{report}");
    println!();
    println!("{:<12} {:>7} {:>9} {:>9} {:>9}", "Domain", "Topics", "Mean", "Max", "Min");
    for d in &per_domain {
        println!(
            "{:<12} {:>7} {:>9.2} {:>9.2} {:>9.2}",
            d.domain, d.n_topics, d.mean_of_means, d.mean_of_max, d.mean_of_min
        );
    }
    Ok(())
}

pub fn ablate(cfg: &PipelineConfig) -> Result<()> {
    let (data, _, _) = dataset(cfg)?;
    let rows = evaluation::ablation(&data, &cfg.evaluation, &cfg.ranker)?;
    write_atomic(&cfg.paths.ablation, |w| {
        Ok(evaluation::write_ablation(w, &rows, &cfg.paths.ablation)?)
    })?;
    println!("{:<12} {:<16} {:>9} {:>9} {:>8}", "Domain", "Removed", "All", "Without", "Delta");
    for r in &rows {
        println!(
            "{:<12} {:<16} {:>9.3} {:>9.3} {:>+8.3}",
            r.domain,
            r.removed.name(),
            r.top1_all,
            r.top1_without,
            r.delta
        );
    }
    Ok(())
}
