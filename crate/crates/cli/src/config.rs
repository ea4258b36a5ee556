use std::path::{Path, PathBuf};

use miscon::corpus::GeneratorSpec;
use miscon::discover::{ClusterConfig, EmbeddingKind, TsneConfig};
use miscon::eval::{ComparisonConfig, SplitSpec};
use miscon::nnet::TrainConfig;
use miscon::pathctx::PathConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every tunable of the pipeline as one flat TOML table. Missing keys take
/// their defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,

    pub correct: usize,
    pub misc_a: usize,
    pub misc_b: usize,
    pub misc_c: usize,
    pub max_jitter: usize,

    pub max_length: usize,
    pub max_width: usize,
    pub max_contexts: usize,
    pub min_count: usize,

    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub batch_size: Option<usize>,
    pub d_emb: usize,
    pub d_hidden: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub val_fraction: f64,
    pub svm_lambda: f64,

    pub train_fraction: f64,
    pub n_runs: usize,
    pub stratified: bool,

    pub minpts: usize,
    pub epsilon: Option<f64>,
    pub per_rubric: bool,
    pub top_k: usize,
    pub duplicate_jaccard: f64,
    pub embedding: EmbeddingKind,
    pub perplexity: f64,
    pub tsne_iterations: usize,
    pub tsne_learning_rate: f64,
    pub exaggeration: f64,
    pub exaggeration_iters: usize,

    /// Input files; each defaults to the file of that name inside `out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let g = GeneratorSpec::default();
        let p = PathConfig::default();
        let t = TrainConfig::default();
        let s = SplitSpec::default();
        let c = ClusterConfig::default();
        PipelineConfig {
            seed: 0,
            correct: g.correct,
            misc_a: g.a,
            misc_b: g.b,
            misc_c: g.c,
            max_jitter: g.max_jitter,
            max_length: p.max_length,
            max_width: p.max_width,
            max_contexts: p.max_contexts,
            min_count: p.min_count,
            learning_rate: t.learning_rate,
            max_epochs: t.max_epochs,
            patience: t.patience,
            batch_size: t.batch_size,
            d_emb: t.d_emb,
            d_hidden: t.d_hidden,
            beta1: t.beta1,
            beta2: t.beta2,
            adam_epsilon: t.epsilon,
            val_fraction: t.val_fraction,
            svm_lambda: t.svm_lambda,
            train_fraction: s.train_fraction,
            n_runs: s.n_runs,
            stratified: s.stratified,
            minpts: c.minpts,
            epsilon: c.epsilon,
            per_rubric: c.per_rubric,
            top_k: c.top_k,
            duplicate_jaccard: c.duplicate_jaccard,
            embedding: c.embedding,
            perplexity: c.tsne.perplexity,
            tsne_iterations: c.tsne.iterations,
            tsne_learning_rate: c.tsne.learning_rate,
            exaggeration: c.tsne.exaggeration,
            exaggeration_iters: c.tsne.exaggeration_iters,
            corpus: None,
            checkpoint: None,
            projection: None,
            clusters: None,
            out: "out".into(),
        }
    }
}

impl PipelineConfig {
    fn input(&self, path: &Option<PathBuf>, name: &str) -> PathBuf {
        path.clone().unwrap_or_else(|| self.out.join(name))
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.input(&self.corpus, "corpus.json")
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.input(&self.checkpoint, "checkpoint.json")
    }

    pub fn projection_path(&self) -> PathBuf {
        self.input(&self.projection, "projection.csv")
    }

    pub fn clusters_path(&self) -> PathBuf {
        self.input(&self.clusters, "clusters.json")
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn generator(&self) -> GeneratorSpec {
        GeneratorSpec {
            correct: self.correct,
            a: self.misc_a,
            b: self.misc_b,
            c: self.misc_c,
            max_jitter: self.max_jitter,
            seed: self.seed,
        }
    }

    pub fn paths(&self) -> PathConfig {
        PathConfig {
            max_length: self.max_length,
            max_width: self.max_width,
            max_contexts: self.max_contexts,
            min_count: self.min_count,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            max_epochs: self.max_epochs,
            patience: self.patience,
            batch_size: self.batch_size,
            seed: self.seed,
            d_emb: self.d_emb,
            d_hidden: self.d_hidden,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.adam_epsilon,
            val_fraction: self.val_fraction,
            svm_lambda: self.svm_lambda,
        }
    }

    pub fn split(&self) -> SplitSpec {
        SplitSpec { train_fraction: self.train_fraction, n_runs: self.n_runs, base_seed: self.seed, stratified: self.stratified }
    }

    pub fn comparison(&self) -> ComparisonConfig {
        ComparisonConfig { train: self.train(), paths: self.paths() }
    }

    pub fn cluster(&self) -> ClusterConfig {
        ClusterConfig {
            minpts: self.minpts,
            epsilon: self.epsilon,
            per_rubric: self.per_rubric,
            top_k: self.top_k,
            duplicate_jaccard: self.duplicate_jaccard,
            embedding: self.embedding,
            tsne: TsneConfig {
                perplexity: self.perplexity,
                iterations: self.tsne_iterations,
                learning_rate: self.tsne_learning_rate,
                exaggeration: self.exaggeration,
                exaggeration_iters: self.exaggeration_iters,
                seed: self.seed,
                ..TsneConfig::default()
            },
        }
    }

    /// Checks every derived section.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seed > i64::MAX as u64 {
            return Err(CliError::Config(format!("seed must be at most {}", i64::MAX)));
        }
        if self.max_jitter > 3 {
            return Err(CliError::Config("max_jitter is at most 3".into()));
        }
        self.paths().validate().map_err(CliError::Config)?;
        self.train().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.split().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.cluster().validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}
