//! The `miscon` command-line pipeline: corpus generation, training,
//! evaluation, discovery and plotting.

pub mod config;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use miscon::corpus::{generate, Corpus, CorpusError};
use miscon::discover::{self, parse_projection_csv, render_report, ClusterFile, DiscoverError};
use miscon::eval::{run_comparison, EvalError, Split};
use miscon::nnet::{train_code2vec, Code2VecParams, NnetError};
use miscon::pathctx::{build_vocab, encode_corpus, extract_corpus, PathConfig, Vocab, VocabDump};
use serde::{Deserialize, Serialize};

pub use config::PipelineConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Corpus { path: PathBuf, source: CorpusError },
    #[error("training failed [{kind}]: {0}", kind = nnet_kind(.0))]
    Train(NnetError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("discovery failed: {0}")]
    Discover(#[from] DiscoverError),
    #[error("{path}: invalid checkpoint: {message}")]
    Checkpoint { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

fn nnet_kind(e: &NnetError) -> &'static str {
    match e {
        NnetError::DegenerateLabels { .. } => "DegenerateLabels",
        NnetError::VocabMismatch(_) => "VocabMismatch",
        NnetError::InvalidConfig(_) => "InvalidConfig",
        NnetError::Diverged { .. } => "Diverged",
    }
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    /// 1 for problems with how the tool was invoked, 2 for pipeline failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "miscon", version, about = "Misconception discovery for turtle-program submissions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus and its ground-truth group file.
    GenCorpus,
    /// Train the code2vec classifier on a corpus.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Compare the four models over resampled splits.
    Evaluate {
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Cluster failing submissions per rubric item.
    Discover {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Draw one SVG scatter plot per cluster report.
    Plot {
        #[arg(long)]
        projection: Option<PathBuf>,
        #[arg(long)]
        clusters: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenCorpus => "gen-corpus",
            Command::Train { .. } => "train",
            Command::Evaluate { .. } => "evaluate",
            Command::Discover { .. } => "discover",
            Command::Plot { .. } => "plot",
        }
    }
}

/// Loads the config file (if any) and applies the command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &cli.common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.common.out {
        cfg.out = out.clone();
    }
    match &cli.command {
        Command::GenCorpus => {}
        Command::Train { corpus } | Command::Evaluate { corpus } => {
            if let Some(c) = corpus {
                cfg.corpus = Some(c.clone());
            }
        }
        Command::Discover { corpus, checkpoint } => {
            if let Some(c) = corpus {
                cfg.corpus = Some(c.clone());
            }
            if let Some(c) = checkpoint {
                cfg.checkpoint = Some(c.clone());
            }
        }
        Command::Plot { projection, clusters } => {
            if let Some(p) = projection {
                cfg.projection = Some(p.clone());
            }
            if let Some(c) = clusters {
                cfg.clusters = Some(c.clone());
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    Corpus::from_json(&read(path)?).map_err(|source| CliError::Corpus { path: path.to_path_buf(), source })
}

/// Runs one command and returns the files it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve_config(cli)?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let mut written = match &cli.command {
        Command::GenCorpus => cmd_gen_corpus(&cfg)?,
        Command::Train { .. } => cmd_train(&cfg)?,
        Command::Evaluate { .. } => cmd_evaluate(&cfg)?,
        Command::Discover { .. } => cmd_discover(&cfg)?,
        Command::Plot { .. } => cmd_plot(&cfg)?,
    };
    written.push(write(&cfg.out, &format!("config.{}.toml", cli.command.name()), &cfg.to_toml())?);
    Ok(written)
}

pub fn cmd_gen_corpus(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let generated = generate(&cfg.generator());
    log::info!("generated {} submissions", generated.corpus.len());
    Ok(vec![
        write(&cfg.out, "corpus.json", &generated.corpus.to_json())?,
        write(&cfg.out, "ground_truth.json", &to_json(&generated.truth))?,
    ])
}

pub const CHECKPOINT_FORMAT: &str = "miscon-code2vec";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Trained classifier plus everything needed to encode new inputs for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub vocab_hash: String,
    pub vocab: VocabDump,
    pub paths: PathConfig,
    pub best_epoch: usize,
    pub params: Code2VecParams,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<(Self, Vocab), CliError> {
        let bad = |message: String| CliError::Checkpoint { path: path.to_path_buf(), message };
        let ckpt: Checkpoint = serde_json::from_str(&read(path)?).map_err(|e| bad(e.to_string()))?;
        if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", ckpt.format, ckpt.version)));
        }
        let vocab = Vocab::from_dump(&ckpt.vocab).ok_or_else(|| bad("malformed vocabulary".into()))?;
        if vocab.content_hash() != ckpt.vocab_hash {
            return Err(bad("vocabulary hash mismatch".into()));
        }
        if vocab.terminal_count() != ckpt.params.n_terminals() || vocab.path_count() != ckpt.params.n_paths() {
            return Err(bad("vocabulary size does not match the embedding tables".into()));
        }
        Ok((ckpt, vocab))
    }
}

pub fn cmd_train(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let corpus = load_corpus(&cfg.corpus_path())?;
    let paths_cfg = cfg.paths();
    let asts: Vec<_> = corpus.submissions.iter().map(|s| &s.ast).collect();
    let paths = extract_corpus(&asts, &paths_cfg);
    let vocab = build_vocab(paths.iter().map(Vec::as_slice), paths_cfg.min_count)
        .map_err(|e| CliError::Input { path: cfg.corpus_path(), message: e.to_string() })?;
    let encoded = encode_corpus(&paths, &vocab, &paths_cfg);
    let truncated = encoded.iter().filter(|e| e.truncated).count();
    if truncated > 0 {
        log::warn!("{truncated} submissions exceed {} contexts and were truncated", paths_cfg.max_contexts);
    }
    log::info!(
        "training on {} submissions ({} terminals, {} paths)",
        corpus.len(),
        vocab.terminal_count(),
        vocab.path_count()
    );
    let refs: Vec<_> = encoded.iter().collect();
    let model = train_code2vec(&refs, &corpus.labels(), vocab.terminal_count(), vocab.path_count(), &cfg.train())
        .map_err(CliError::Train)?;
    let h = &model.history;
    log::info!(
        "stopped after {} epochs; best epoch {} with validation loss {:.4}",
        h.epochs(),
        h.best_epoch,
        h.val_loss[h.best_epoch]
    );
    let ckpt = Checkpoint {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        vocab_hash: vocab.content_hash(),
        vocab: vocab.dump(),
        paths: paths_cfg,
        best_epoch: h.best_epoch,
        params: model.params,
    };
    Ok(vec![write(&cfg.out, "checkpoint.json", &to_json(&ckpt))?, write(&cfg.out, "history.csv", &h.to_csv())?])
}

/// Split log kept next to the metrics so reruns reuse the same splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitLog {
    pub base_seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
    pub corpus_size: usize,
    pub splits: Vec<Split>,
}

pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let corpus = load_corpus(&cfg.corpus_path())?;
    let spec = cfg.split();
    let cache = cfg.out.join("splits.json");
    let cached = fs::read_to_string(&cache)
        .ok()
        .and_then(|text| serde_json::from_str::<SplitLog>(&text).ok())
        .filter(|log| {
            log.base_seed == spec.base_seed
                && log.train_fraction == spec.train_fraction
                && log.stratified == spec.stratified
                && log.corpus_size == corpus.len()
                && log.splits.len() == spec.n_runs
        })
        .map(|log| log.splits);
    if cached.is_some() {
        log::info!("reusing cached splits from {}", cache.display());
    }
    let result = run_comparison(&corpus, &spec, &cfg.comparison(), cached)?;
    for s in &result.summary {
        log::info!(
            "{:>8}: accuracy {:.4} precision {:.4} recall {:.4} auc {:.4} f1 {:.4}",
            s.model.name(),
            s.accuracy,
            s.precision,
            s.recall,
            s.auc,
            s.f1
        );
    }
    let split_log = SplitLog {
        base_seed: spec.base_seed,
        train_fraction: spec.train_fraction,
        stratified: spec.stratified,
        corpus_size: corpus.len(),
        splits: result.splits.clone(),
    };
    Ok(vec![
        write(&cfg.out, "metrics.csv", &result.metrics_csv())?,
        write(&cfg.out, "summary.csv", &result.summary_csv())?,
        write(&cfg.out, "splits.json", &to_json(&split_log))?,
    ])
}

pub fn cmd_discover(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let corpus = load_corpus(&cfg.corpus_path())?;
    let (ckpt, vocab) = Checkpoint::load(&cfg.checkpoint_path())?;
    if ckpt.paths != cfg.paths() {
        log::warn!("path settings differ from the configuration; using the checkpoint's");
    }
    let asts: Vec<_> = corpus.submissions.iter().map(|s| &s.ast).collect();
    let encoded = encode_corpus(&extract_corpus(&asts, &ckpt.paths), &vocab, &ckpt.paths);
    let found = discover::discover(&corpus, &ckpt.params, &encoded, &cfg.cluster())?;
    for item in &found.file.items {
        log::info!("{}: {} failing, {} clusters, {} noise", item.item, item.failing, item.clusters.len(), item.noise.len());
    }
    Ok(vec![
        write(&cfg.out, "clusters.json", &found.clusters_json())?,
        write(&cfg.out, "projection.csv", &found.projection_csv())?,
        write(&cfg.out, "report.txt", &render_report(&found.file, &corpus))?,
    ])
}

pub fn cmd_plot(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    let input_err = |path: &Path, message: String| CliError::Input { path: path.to_path_buf(), message };
    let (projection, clusters) = (cfg.projection_path(), cfg.clusters_path());
    let rows = parse_projection_csv(&read(&projection)?).map_err(|e| input_err(&projection, e.to_string()))?;
    let file: ClusterFile =
        serde_json::from_str(&read(&clusters)?).map_err(|e| input_err(&clusters, e.to_string()))?;
    file.items
        .iter()
        .map(|report| write(&cfg.out, &format!("plot_{}.svg", report.item), &plot::render_svg(&rows, report)))
        .collect()
}
