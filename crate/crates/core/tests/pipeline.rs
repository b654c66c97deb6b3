use std::io::Write;

use proptest::prelude::*;

use netl_core::corpus::{filter_articles, read_articles, tokenize, write_articles};
use netl_core::embeddings::{train_dbow, train_skipgram};
use netl_core::features::{num_words, pagerank, topic_overlap, PageRankConfig};
use netl_core::{Article, ArticleRecord, EmbeddingTable, LinkGraph, TableKind, Topic, TrainConfig};

fn article(id: u64, title: &str, body: &str, links: &[u64]) -> Article {
    Article::from_record(ArticleRecord {
        id,
        title: title.into(),
        body: body.into(),
        outlinks: links.to_vec(),
    })
}

fn small_config(seed: u64) -> TrainConfig {
    TrainConfig {
        dim: 12,
        window: 3,
        subsample_threshold: 1e-2,
        epochs: 5,
        min_count: 1,
        seed,
        ..TrainConfig::desk_skipgram()
    }
}

fn sentences() -> Vec<Vec<String>> {
    [
        "the compiler parses source code into tokens",
        "a kernel schedules processes on the cpu",
        "bake the bread in a hot oven",
        "knead the dough then bake the bread",
        "the telescope observes a distant galaxy",
        "the planet orbits a bright star",
    ]
    .iter()
    .map(|s| tokenize(s))
    .collect()
}

#[test]
fn trained_vectors_are_finite_and_nonzero() {
    let words = train_skipgram(&sentences(), &small_config(1), 1).unwrap();
    let docs: Vec<(String, Vec<String>)> = sentences()
        .into_iter()
        .enumerate()
        .map(|(i, s)| (format!("doc_{i}"), s))
        .collect();
    let dbow = train_dbow(
        &docs,
        &TrainConfig {
            train_words: true,
            ..small_config(2)
        },
        1,
    )
    .unwrap();
    for table in [&words, &dbow.documents, &dbow.words] {
        assert!(!table.is_empty());
        for (token, v) in table.iter() {
            assert_eq!(v.len(), 12);
            assert!(v.iter().all(|x| x.is_finite()), "{token}");
            assert!(v.iter().any(|&x| x != 0.0), "{token}");
        }
    }
    assert_eq!(dbow.documents.len(), 6);
}

#[test]
fn single_worker_training_is_repeatable() {
    let a = train_skipgram(&sentences(), &small_config(3), 1).unwrap();
    let b = train_skipgram(&sentences(), &small_config(3), 1).unwrap();
    assert_eq!(a, b);
}

#[test]
fn embedding_file_round_trip() {
    let table = train_skipgram(&sentences(), &small_config(4), 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vectors.txt");
    table.export(&path).unwrap();
    let back = EmbeddingTable::import(&path, TableKind::WordFromWordModel).unwrap();
    assert_eq!(back.tokens(), table.tokens());
    for (token, v) in table.iter() {
        assert_eq!(back.get(token).unwrap(), v);
    }
}

#[test]
fn articles_survive_a_file_round_trip() {
    let articles = vec![
        article(1, "Bread", "knead the dough, then bake it.", &[2]),
        article(2, "Oven", "an oven is hot", &[]),
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("articles.jsonl");
    let mut f = std::fs::File::create(&path).unwrap();
    write_articles(&mut f, &articles).unwrap();
    f.flush().unwrap();
    assert_eq!(read_articles(&path).unwrap(), articles);
}

#[test]
fn pagerank_is_a_distribution() {
    let articles = vec![
        article(1, "A", "x", &[2, 3]),
        article(2, "B", "x", &[3]),
        article(3, "C", "x", &[1]),
        article(4, "D", "x", &[]),
    ];
    let pr = pagerank(&LinkGraph::from_articles(&articles), &PageRankConfig::default()).unwrap();
    assert!(pr.converged);
    assert!(pr.scores.values().all(|&s| s > 0.0));
    assert!((pr.scores.values().sum::<f64>() - 1.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn filtering_keeps_order_and_never_grows(
        specs in prop::collection::vec((0usize..8, any::<bool>()), 0..20),
        min in 0usize..6,
    ) {
        let articles: Vec<Article> = specs
            .iter()
            .enumerate()
            .map(|(i, &(len, disamb))| {
                let title = if disamb { format!("T{i} (disambiguation)") } else { format!("T{i}") };
                article(i as u64, &title, &vec!["w"; len].join(" "), &[])
            })
            .collect();
        let kept: Vec<u64> = filter_articles(articles.clone(), min).map(|a| a.id).collect();
        prop_assert!(kept.len() <= articles.len());
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));
        for id in &kept {
            let (len, disamb) = specs[*id as usize];
            prop_assert!(len >= min && !disamb);
        }
        prop_assert_eq!(kept.len(), specs.iter().filter(|&&(len, d)| len >= min && !d).count());
    }

    #[test]
    fn overlap_never_exceeds_label_length(
        label in prop::collection::vec("[a-z]{1,6}", 1..5),
        terms in prop::collection::vec("[a-z]{1,6}", 1..10),
    ) {
        let label = label.join(" ");
        let refs: Vec<&str> = terms.iter().map(String::as_str).collect();
        let topic = Topic::new("t", "d", &refs);
        prop_assert!(topic_overlap(&label, &topic) <= num_words(&label).unwrap());
    }

    #[test]
    fn tokens_are_lowercase_and_nonempty(text in "[A-Za-z .,'()-]{0,40}") {
        for t in tokenize(&text) {
            prop_assert!(!t.is_empty());
            prop_assert_eq!(t.to_lowercase(), t.clone());
            prop_assert!(!t.contains(char::is_whitespace));
        }
    }
}
