//! Full-batch (or mini-batch) Adam with early stopping on validation loss.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig, Parameters};
use super::code2vec::Code2VecParams;
use super::fcnn::FcNet;
use super::svm::LinearSvm;
use super::NnetError;
use crate::pathctx::EncodedSubmission;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
    /// `None` trains on the full set each step.
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub d_emb: usize,
    pub d_hidden: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Share of the training split held out for early stopping.
    pub val_fraction: f64,
    pub svm_lambda: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.0002,
            max_epochs: 10_000,
            patience: 400,
            batch_size: None,
            seed: 0,
            d_emb: 100,
            d_hidden: 100,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            val_fraction: 0.125,
            svm_lambda: 1e-3,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig { learning_rate: self.learning_rate, beta1: self.beta1, beta2: self.beta2, epsilon: self.epsilon }
    }

    pub fn validate(&self) -> Result<(), NnetError> {
        let bad = |what: &str| Err(NnetError::InvalidConfig(what.to_string()));
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.max_epochs == 0 || self.patience == 0 || self.patience >= self.max_epochs {
            return bad("need 0 < patience < max_epochs");
        }
        if self.d_emb == 0 || self.d_hidden == 0 {
            return bad("layer dimensions must be positive");
        }
        if self.batch_size == Some(0) {
            return bad("batch_size must be positive");
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return bad("val_fraction must be in [0, 1)");
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0 && self.epsilon > 0.0) {
            return bad("Adam betas must be in (0, 1) and epsilon positive");
        }
        if self.svm_lambda < 0.0 {
            return bad("svm_lambda must be non-negative");
        }
        Ok(())
    }
}

/// Independent RNG streams derived from one seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) const INIT_STREAM: u64 = 1;
const CARVE_STREAM: u64 = 2;
const BATCH_STREAM: u64 = 3;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_acc: Vec<f64>,
    /// Epoch whose parameters were kept (lowest validation loss, earliest on ties).
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    /// `epoch,train_loss,val_loss,val_acc`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,val_acc\n");
        for e in 0..self.epochs() {
            let _ = writeln!(out, "{e},{},{},{}", self.train_loss[e], self.val_loss[e], self.val_acc[e]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel<M> {
    pub params: M,
    pub history: TrainHistory,
}

/// Anything the early-stopping loop can optimize.
pub trait Trainable: Parameters + Clone {
    type Input: ?Sized;

    fn loss_and_gradients(&self, batch: &[&Self::Input], labels: &[bool]) -> (f64, Self);

    /// Validation loss and accuracy.
    fn evaluate(&self, batch: &[&Self::Input], labels: &[bool]) -> (f64, f64);
}

fn accuracy(predicted: impl Iterator<Item = bool>, labels: &[bool]) -> f64 {
    let hits = predicted.zip(labels).filter(|(p, y)| p == *y).count();
    hits as f64 / labels.len() as f64
}

impl Trainable for Code2VecParams {
    type Input = EncodedSubmission;

    fn loss_and_gradients(&self, batch: &[&EncodedSubmission], labels: &[bool]) -> (f64, Self) {
        Code2VecParams::loss_and_gradients(self, batch, labels)
    }

    fn evaluate(&self, batch: &[&EncodedSubmission], labels: &[bool]) -> (f64, f64) {
        let fwd = self.forward_batch(batch).expect("inputs validated before training");
        let loss = fwd
            .iter()
            .zip(labels)
            .map(|(f, &y)| -f.probs[usize::from(y)].max(f64::MIN_POSITIVE).ln())
            .sum::<f64>()
            / labels.len() as f64;
        (loss, accuracy(fwd.iter().map(|f| f.probs[1] > 0.5), labels))
    }
}

impl Trainable for FcNet {
    type Input = [f64];

    fn loss_and_gradients(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, Self) {
        FcNet::loss_and_gradients(self, batch, labels)
    }

    fn evaluate(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, f64) {
        (self.loss(batch, labels), accuracy(batch.iter().map(|x| self.predict_proba(x)[1] > 0.5), labels))
    }
}

impl Trainable for LinearSvm {
    type Input = [f64];

    fn loss_and_gradients(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, Self) {
        LinearSvm::loss_and_gradients(self, batch, labels)
    }

    fn evaluate(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, f64) {
        (self.objective(batch, labels), accuracy(batch.iter().map(|x| self.predict(x)), labels))
    }
}

pub(crate) fn check_labels(labels: &[bool]) -> Result<(), NnetError> {
    let positives = labels.iter().filter(|&&y| y).count();
    if positives == 0 || positives == labels.len() {
        return Err(NnetError::DegenerateLabels { positives, total: labels.len() });
    }
    Ok(())
}

/// Splits training indices into (fit, validation) with the seeded carve RNG.
fn carve(n: usize, cfg: &TrainConfig) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let n_val = ((n as f64) * cfg.val_fraction).round() as usize;
    if n_val == 0 || n_val >= n {
        return (idx, Vec::new());
    }
    idx.shuffle(&mut stream_rng(cfg.seed, CARVE_STREAM));
    let val = idx.split_off(n - n_val);
    (idx, val)
}

/// Trains `init` with Adam. Validation loss drives early stopping; with no
/// validation rows the training loss does.
pub fn fit<M: Trainable>(
    init: M,
    inputs: &[&M::Input],
    labels: &[bool],
    cfg: &TrainConfig,
) -> Result<TrainedModel<M>, NnetError> {
    cfg.validate()?;
    check_labels(labels)?;
    let (fit_idx, val_idx) = carve(inputs.len(), cfg);
    let pick = |ix: &[usize]| -> (Vec<&M::Input>, Vec<bool>) {
        (ix.iter().map(|&i| inputs[i]).collect(), ix.iter().map(|&i| labels[i]).collect())
    };
    let (fit_x, fit_y) = pick(&fit_idx);
    let (val_x, val_y) = pick(&val_idx);

    let mut params = init;
    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut history = TrainHistory::default();
    let mut adam = Adam::new(cfg.adam());
    let mut batch_rng = stream_rng(cfg.seed, BATCH_STREAM);
    let batch_size = cfg.batch_size.unwrap_or(fit_x.len()).min(fit_x.len());
    let mut order: Vec<usize> = (0..fit_x.len()).collect();

    for epoch in 0..cfg.max_epochs {
        let train_loss = if batch_size == fit_x.len() {
            let (loss, grads) = params.loss_and_gradients(&fit_x, &fit_y);
            adam.step(&mut params, &grads);
            loss
        } else {
            order.shuffle(&mut batch_rng);
            let mut total = 0.0;
            for chunk in order.chunks(batch_size) {
                let bx: Vec<&M::Input> = chunk.iter().map(|&i| fit_x[i]).collect();
                let by: Vec<bool> = chunk.iter().map(|&i| fit_y[i]).collect();
                let (loss, grads) = params.loss_and_gradients(&bx, &by);
                adam.step(&mut params, &grads);
                total += loss * chunk.len() as f64;
            }
            total / fit_x.len() as f64
        };
        let (val_loss, val_acc) =
            if val_x.is_empty() { params.evaluate(&fit_x, &fit_y) } else { params.evaluate(&val_x, &val_y) };
        if !val_loss.is_finite() || !train_loss.is_finite() {
            return Err(NnetError::Diverged { epoch });
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(val_loss);
        history.val_acc.push(val_acc);
        if val_loss < best_loss {
            best_loss = val_loss;
            best = params.clone();
            history.best_epoch = epoch;
        } else if epoch - history.best_epoch >= cfg.patience {
            break;
        }
    }
    Ok(TrainedModel { params: best, history })
}

/// Trains the code2vec classifier on encoded submissions.
pub fn train_code2vec(
    inputs: &[&EncodedSubmission],
    labels: &[bool],
    n_terminals: usize,
    n_paths: usize,
    cfg: &TrainConfig,
) -> Result<TrainedModel<Code2VecParams>, NnetError> {
    check_labels(labels)?;
    let init = Code2VecParams::init(n_terminals, n_paths, cfg.d_emb, cfg.d_hidden, &mut stream_rng(cfg.seed, INIT_STREAM));
    for enc in inputs {
        init.check_input(enc)?;
    }
    fit(init, inputs, labels, cfg)
}

/// Trains the fully connected baseline (hidden width `d_hidden`, tanh).
pub fn train_fc_nn(rows: &[&[f64]], labels: &[bool], cfg: &TrainConfig) -> Result<TrainedModel<FcNet>, NnetError> {
    check_labels(labels)?;
    let n_inputs = rows.first().map_or(0, |r| r.len());
    let init = FcNet::init(n_inputs, cfg.d_hidden, &mut stream_rng(cfg.seed, INIT_STREAM));
    fit(init, rows, labels, cfg)
}

/// Trains the linear SVM from a zero start.
pub fn train_linear_svm(rows: &[&[f64]], labels: &[bool], cfg: &TrainConfig) -> Result<TrainedModel<LinearSvm>, NnetError> {
    check_labels(labels)?;
    let n_inputs = rows.first().map_or(0, |r| r.len());
    fit(LinearSvm::zeros(n_inputs, cfg.svm_lambda), rows, labels, cfg)
}
