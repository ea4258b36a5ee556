//! Minimal neural-network core and the trainable models: the code2vec
//! attention classifier, a fully connected TF-IDF baseline, a linear SVM, and
//! the majority-class baseline.

mod adam;
mod code2vec;
mod fcnn;
mod majority;
mod matrix;
mod svm;
mod train;

pub use adam::{adam_step, Adam, AdamConfig, AdamMoments, ParamGroup, Parameters};
pub use code2vec::{Code2VecParams, Forward};
pub use fcnn::FcNet;
pub use majority::MajorityBaseline;
pub use matrix::{dot, log_softmax_at, softmax, Matrix};
pub use svm::LinearSvm;
pub use train::{fit, train_code2vec, train_fc_nn, train_linear_svm, TrainConfig, TrainHistory, TrainedModel, Trainable};

pub(crate) use train::stream_rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnetError {
    #[error("degenerate labels: {positives} positive out of {total}; both classes are required")]
    DegenerateLabels { positives: usize, total: usize },
    #[error("input does not match the model vocabulary: {0}")]
    VocabMismatch(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },
}
