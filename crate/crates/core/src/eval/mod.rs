//! Train/test resampling, binary classification metrics and the multi-run
//! model comparison.

mod compare;
mod metrics;
mod split;

pub use compare::{draw_splits, run_comparison, Comparison, ComparisonConfig, ModelKind, RunRecord, SummaryRow};
pub use metrics::{auc, binary_metrics, binary_metrics_from, MetricRow};
pub use split::{resample_split, Split, SplitSpec, MIN_CORPUS};

use crate::nnet::NnetError;
use crate::pathctx::PathCtxError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("corpus has {n} submissions; at least {min} are needed")]
    CorpusTooSmall { n: usize, min: usize },
    #[error("invalid evaluation setup: {0}")]
    InvalidSpec(String),
    #[error("run {run}: {source}")]
    Run { run: usize, source: NnetError },
    #[error(transparent)]
    PathCtx(PathCtxError),
}
