mod config;
mod io;
mod stages;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use stages::EmbeddingModel;

/// Invalid user input detected by the CLI itself: missing files, malformed
/// config, bad overrides.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

const EXIT_RUNTIME: u8 = 1;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "netl", version, about = "Label topic-model topics with article titles")]
struct Cli {
    /// Pipeline config (TOML). Relative paths in it are resolved against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for embedding training, the ranker and cross-validation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 gives byte-identical outputs across runs, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Override any config key, e.g. `--set skipgram.dim=100`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter and tokenize articles, build title lexicons and the collapsed text.
    Preprocess {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        min_body_tokens: Option<usize>,
    },
    /// Train dbow document vectors and/or skip-gram word vectors.
    TrainEmbeddings {
        #[arg(long, value_enum, default_value_t = EmbeddingModel::All)]
        model: EmbeddingModel,
    },
    /// Compute PageRank over the article link graph.
    Pagerank,
    /// Generate candidate labels for each topic.
    Generate(GenerateArgs),
    /// Compute reranking features for the candidates.
    Features,
    /// Fit the reranking model on rated candidates.
    TrainRanker {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Rank candidate labels with a trained model.
    Label {
        /// Precomputed feature table; without it candidates and features are computed first.
        #[arg(long)]
        features: Option<PathBuf>,
        #[command(flatten)]
        generate: GenerateArgs,
    },
    /// Baseline, in-domain, cross-domain and upper-bound results.
    Evaluate(EvalArgs),
    /// Top-1 average with each feature removed.
    Ablate(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    out_k: Option<usize>,
    #[arg(long)]
    k_per_source: Option<usize>,
    #[arg(long)]
    topic_terms: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
}

fn push<T: fmt::Display>(out: &mut Vec<String>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        out.push(format!("{key}={v}"));
    }
}

fn push_path(out: &mut Vec<String>, key: &str, value: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = value {
        let abs = std::path::absolute(p)?;
        let s = toml::Value::String(abs.to_string_lossy().into_owned());
        out.push(format!("{key}={s}"));
    }
    Ok(())
}

impl GenerateArgs {
    fn overrides(&self, out: &mut Vec<String>) {
        push(out, "generation.out_k", self.out_k);
        push(out, "generation.k_per_source", self.k_per_source);
        push(out, "generation.topic_terms", self.topic_terms);
    }
}

impl EvalArgs {
    fn overrides(&self, out: &mut Vec<String>) {
        push(out, "evaluation.cv.folds", self.folds);
        push(out, "evaluation.cv.runs", self.runs);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut overrides = cli.overrides.clone();
    for key in ["dbow.seed", "skipgram.seed", "ranker.seed", "evaluation.cv.seed"] {
        push(&mut overrides, key, cli.seed);
    }
    match &cli.command {
        Command::Preprocess { input, min_body_tokens } => {
            push_path(&mut overrides, "paths.raw_articles", input)?;
            push(&mut overrides, "corpus.min_body_tokens", *min_body_tokens);
        }
        Command::Generate(g) | Command::Label { generate: g, .. } => g.overrides(&mut overrides),
        Command::TrainRanker { c, epsilon } => {
            push(&mut overrides, "ranker.c", *c);
            push(&mut overrides, "ranker.epsilon", *epsilon);
        }
        Command::Evaluate(e) | Command::Ablate(e) => e.overrides(&mut overrides),
        _ => {}
    }
    let cfg = config::load(cli.config.as_deref(), &overrides)?;

    let workers = match cli.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()?;
    log::info!("workers={workers}");

    match cli.command {
        Command::Preprocess { .. } => stages::preprocess(&cfg),
        Command::TrainEmbeddings { model } => stages::train_embeddings(&cfg, model, workers),
        Command::Pagerank => stages::run_pagerank(&cfg),
        Command::Generate(_) => stages::generate(&cfg),
        Command::Features => stages::features(&cfg),
        Command::TrainRanker { .. } => stages::train_ranker(&cfg),
        Command::Label { features, .. } => {
            let features = features.map(std::path::absolute).transpose()?;
            stages::label(&cfg, features.as_deref())
        }
        Command::Evaluate(_) => stages::evaluate(&cfg),
        Command::Ablate(_) => stages::ablate(&cfg),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InputError>() {
            return EXIT_INPUT;
        }
        if let Some(e) = cause.downcast_ref::<netl_core::Error>() {
            return if e.is_input_error() { EXIT_INPUT } else { EXIT_RUNTIME };
        }
    }
    EXIT_RUNTIME
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
