//! Misconception discovery for student programs.
//!
//! A code2vec-style attention classifier is trained on turtle-program ASTs to
//! predict whether a submission satisfies every rubric item. The per-context
//! vectors feeding its attention layer are then used as code embeddings:
//! failing submissions are projected with exact t-SNE and grouped per rubric
//! item with DBSCAN, giving candidate misconception clusters for an expert to
//! inspect.
//!
//! Module map:
//!
//! - [`turtlelang`]: parser, portable AST format, rubric grader, tree edit distance
//! - [`pathctx`]: AST path contexts, vocabularies, fixed-length encodings, TF-IDF
//! - [`nnet`]: matrices, Adam, the code2vec classifier and the baselines
//! - [`eval`]: resampled splits, metrics, and the model comparison harness
//! - [`discover`]: embeddings, t-SNE, epsilon selection, DBSCAN, cluster reports
//! - [`corpus`]: corpus file schema and the synthetic corpus generator

pub mod corpus;
pub mod discover;
pub mod eval;
pub mod nnet;
pub mod pathctx;
pub mod turtlelang;

pub use turtlelang::{Ast, AstNode};
