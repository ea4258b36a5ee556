//! Path contexts, vocabularies and fixed-length encodings for the code2vec
//! model, plus the TF-IDF bag-of-labels featurizer used by the baselines.

mod encode;
mod paths;
mod tfidf;
mod vocab;

use serde::{Deserialize, Serialize};

pub use encode::{encode, EncodedSubmission, PAD, UNK};
pub use paths::{extract_paths, Direction, PathContext};
pub use tfidf::{tfidf_features, TfidfModel};
pub use vocab::{build_vocab, Vocab, VocabDump};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathCtxError {
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Path extraction and encoding parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConfig {
    /// Maximum number of internal nodes on a path.
    pub max_length: usize,
    /// Maximum leaf-order distance between the two terminals.
    pub max_width: usize,
    /// Contexts kept per submission (C).
    pub max_contexts: usize,
    /// Corpus frequency below which tokens map to UNK.
    pub min_count: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { max_length: 8, max_width: 2, max_contexts: 100, min_count: 1 }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_length == 0 || self.max_width == 0 || self.max_contexts == 0 || self.min_count == 0 {
            return Err("path parameters must all be at least 1".into());
        }
        Ok(())
    }
}

/// Path contexts for every tree, in input order.
pub fn extract_corpus(asts: &[&crate::Ast], cfg: &PathConfig) -> Vec<Vec<PathContext>> {
    use rayon::prelude::*;
    asts.par_iter().map(|a| extract_paths(a, cfg.max_length, cfg.max_width)).collect()
}

/// Encodes every context set against `vocab`, in input order.
pub fn encode_corpus(paths: &[Vec<PathContext>], vocab: &Vocab, cfg: &PathConfig) -> Vec<EncodedSubmission> {
    paths.iter().map(|p| encode(p, vocab, cfg.max_contexts)).collect()
}
