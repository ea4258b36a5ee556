use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{binary_metrics, binary_metrics_from, MetricRow};
use super::split::{resample_split, Split, SplitSpec};
use super::EvalError;
use crate::corpus::Corpus;
use crate::nnet::{train_code2vec, train_fc_nn, train_linear_svm, MajorityBaseline, TrainConfig};
use crate::pathctx::{build_vocab, encode_corpus, extract_corpus, PathConfig, PathContext, TfidfModel};
use crate::Ast;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Majority,
    Svm,
    Nn,
    Code2vec,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Majority, ModelKind::Svm, ModelKind::Nn, ModelKind::Code2vec];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Majority => "majority",
            ModelKind::Svm => "svm",
            ModelKind::Nn => "nn",
            ModelKind::Code2vec => "code2vec",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub train: TrainConfig,
    pub paths: PathConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: ModelKind,
    pub run: usize,
    pub seed: u64,
    pub metrics: MetricRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: ModelKind,
    /// Means over runs.
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: f64,
    pub f1: f64,
    /// Runs whose test split held a single class.
    pub auc_undefined_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub splits: Vec<Split>,
    /// Ordered by run, then model.
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

impl Comparison {
    /// `model,run,accuracy,precision,recall,auc,f1`
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("model,run,accuracy,precision,recall,auc,f1\n");
        for r in &self.runs {
            let vals: Vec<String> = r.metrics.values().iter().map(|&v| fmt_f(v)).collect();
            let _ = writeln!(out, "{},{},{}", r.model, r.run, vals.join(","));
        }
        out
    }

    /// `model,accuracy,precision,recall,auc,f1` with means over runs.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("model,accuracy,precision,recall,auc,f1\n");
        for s in &self.summary {
            let vals = [s.accuracy, s.precision, s.recall, s.auc, s.f1].map(fmt_f);
            let _ = writeln!(out, "{},{}", s.model, vals.join(","));
        }
        out
    }

    pub fn summary_for(&self, model: ModelKind) -> Option<&SummaryRow> {
        self.summary.iter().find(|s| s.model == model)
    }
}

fn summarize(runs: &[RunRecord]) -> Vec<SummaryRow> {
    ModelKind::ALL
        .iter()
        .map(|&model| {
            let rows: Vec<&MetricRow> = runs.iter().filter(|r| r.model == model).map(|r| &r.metrics).collect();
            let n = rows.len() as f64;
            let mean = |f: fn(&MetricRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                model,
                accuracy: mean(|r| r.accuracy),
                precision: mean(|r| r.precision),
                recall: mean(|r| r.recall),
                auc: mean(|r| r.auc),
                f1: mean(|r| r.f1),
                auc_undefined_runs: rows.iter().filter(|r| r.auc_undefined).count(),
            }
        })
        .collect()
}

/// Featurized corpus shared by every run.
struct Features<'a> {
    asts: Vec<&'a Ast>,
    paths: Vec<Vec<PathContext>>,
    labels: Vec<bool>,
}

fn pick<T: Clone>(xs: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| xs[i].clone()).collect()
}

fn evaluate_split(features: &Features<'_>, split: &Split, cfg: &ComparisonConfig) -> Result<Vec<RunRecord>, EvalError> {
    let wrap = |source| EvalError::Run { run: split.run, source };
    let train_cfg = TrainConfig { seed: split.seed, ..cfg.train };
    let y_train = pick(&features.labels, &split.train);
    let y_test = pick(&features.labels, &split.test);
    let mut records = Vec::with_capacity(4);
    let mut push = |model, metrics| records.push(RunRecord { model, run: split.run, seed: split.seed, metrics });

    let majority = MajorityBaseline::fit(&y_train);
    push(ModelKind::Majority, binary_metrics(&vec![majority.score(); y_test.len()], &y_test, 0.5));

    let tfidf = TfidfModel::fit_asts(&pick(&features.asts, &split.train)).map_err(EvalError::PathCtx)?;
    let x_train: Vec<Vec<f64>> = split.train.iter().map(|&i| tfidf.transform_ast(features.asts[i])).collect();
    let x_test: Vec<Vec<f64>> = split.test.iter().map(|&i| tfidf.transform_ast(features.asts[i])).collect();
    let train_rows: Vec<&[f64]> = x_train.iter().map(Vec::as_slice).collect();

    let svm = train_linear_svm(&train_rows, &y_train, &train_cfg).map_err(wrap)?.params;
    let scores: Vec<f64> = x_test.iter().map(|x| svm.decision(x)).collect();
    let predicted: Vec<bool> = x_test.iter().map(|x| svm.predict(x)).collect();
    push(ModelKind::Svm, binary_metrics_from(&predicted, &scores, &y_test));

    let nn = train_fc_nn(&train_rows, &y_train, &train_cfg).map_err(wrap)?.params;
    let scores: Vec<f64> = x_test.iter().map(|x| nn.predict_proba(x)[1]).collect();
    push(ModelKind::Nn, binary_metrics(&scores, &y_test, 0.5));

    let train_paths = pick(&features.paths, &split.train);
    let vocab = build_vocab(train_paths.iter().map(Vec::as_slice), cfg.paths.min_count).map_err(EvalError::PathCtx)?;
    let enc_train = encode_corpus(&train_paths, &vocab, &cfg.paths);
    let enc_test = encode_corpus(&pick(&features.paths, &split.test), &vocab, &cfg.paths);
    let refs: Vec<_> = enc_train.iter().collect();
    let model = train_code2vec(&refs, &y_train, vocab.terminal_count(), vocab.path_count(), &train_cfg)
        .map_err(wrap)?
        .params;
    let fwd = model.forward_batch(&enc_test.iter().collect::<Vec<_>>()).map_err(wrap)?;
    let scores: Vec<f64> = fwd.iter().map(|f| f.probs[1]).collect();
    push(ModelKind::Code2vec, binary_metrics(&scores, &y_test, 0.5));
    Ok(records)
}

/// Draws the splits of every run.
pub fn draw_splits(labels: &[bool], spec: &SplitSpec) -> Result<Vec<Split>, EvalError> {
    (0..spec.n_runs).map(|run| resample_split(labels, spec, run)).collect()
}

/// Trains and scores the four models on each run's split. Runs execute in
/// parallel; results are ordered by run index. Pass `splits` to reuse a
/// previously drawn set.
pub fn run_comparison(
    corpus: &Corpus,
    spec: &SplitSpec,
    cfg: &ComparisonConfig,
    splits: Option<Vec<Split>>,
) -> Result<Comparison, EvalError> {
    spec.validate()?;
    cfg.train.validate().map_err(|source| EvalError::Run { run: 0, source })?;
    cfg.paths.validate().map_err(EvalError::InvalidSpec)?;
    let labels = corpus.labels();
    let splits = match splits {
        Some(s) => {
            check_splits(&s, corpus.len())?;
            s
        }
        None => draw_splits(&labels, spec)?,
    };
    let asts: Vec<&Ast> = corpus.submissions.iter().map(|s| &s.ast).collect();
    let features = Features { paths: extract_corpus(&asts, &cfg.paths), asts, labels };
    let per_run: Vec<Vec<RunRecord>> =
        splits.par_iter().map(|split| evaluate_split(&features, split, cfg)).collect::<Result<_, _>>()?;
    let runs: Vec<RunRecord> = per_run.into_iter().flatten().collect();
    Ok(Comparison { summary: summarize(&runs), runs, splits })
}

fn check_splits(splits: &[Split], n: usize) -> Result<(), EvalError> {
    for s in splits {
        let mut seen = vec![false; n];
        for &i in s.train.iter().chain(&s.test) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(EvalError::InvalidSpec(format!("cached split {} does not match the corpus", s.run)));
            }
        }
        if seen.iter().any(|&x| !x) || s.train.is_empty() || s.test.is_empty() {
            return Err(EvalError::InvalidSpec(format!("cached split {} does not match the corpus", s.run)));
        }
    }
    Ok(())
}
