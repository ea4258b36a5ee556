use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::PathCtxError;
use crate::turtlelang::Ast;

/// Smoothed TF-IDF over AST node labels: `tf` is the raw count and
/// `idf = ln((1 + N) / (1 + df)) + 1`; rows are L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    vocab: Vec<String>,
    idf: Vec<f64>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl TfidfModel {
    pub fn fit<D, T>(docs: &[D]) -> Result<Self, PathCtxError>
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        if docs.is_empty() {
            return Err(PathCtxError::EmptyCorpus);
        }
        let vocab: BTreeSet<&str> = docs.iter().flat_map(|d| d.as_ref().iter().map(AsRef::as_ref)).collect();
        let vocab: Vec<String> = vocab.into_iter().map(str::to_string).collect();
        let index: HashMap<String, usize> = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut df = vec![0usize; vocab.len()];
        for d in docs {
            let present: BTreeSet<usize> = d.as_ref().iter().map(|t| index[t.as_ref()]).collect();
            for i in present {
                df[i] += 1;
            }
        }
        let n = docs.len() as f64;
        let idf = df.iter().map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0).collect();
        Ok(TfidfModel { vocab, idf, index })
    }

    pub fn fit_asts(asts: &[&Ast]) -> Result<Self, PathCtxError> {
        let docs: Vec<Vec<&str>> = asts.iter().map(|a| a.labels().collect()).collect();
        Self::fit(&docs)
    }

    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.index.get(token).map(|&i| self.idf[i])
    }

    /// Dense row for one document; unseen tokens are dropped.
    pub fn transform<T: AsRef<str>>(&self, doc: &[T]) -> Vec<f64> {
        let mut row = vec![0.0; self.vocab.len()];
        for t in doc {
            if let Some(&i) = self.index.get(t.as_ref()) {
                row[i] += 1.0;
            }
        }
        for (x, idf) in row.iter_mut().zip(&self.idf) {
            *x *= idf;
        }
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
        row
    }

    pub fn transform_ast(&self, ast: &Ast) -> Vec<f64> {
        let doc: Vec<&str> = ast.labels().collect();
        self.transform(&doc)
    }
}

/// Fits on `asts` and returns the model with one row per AST.
pub fn tfidf_features(asts: &[&Ast]) -> Result<(TfidfModel, Vec<Vec<f64>>), PathCtxError> {
    let model = TfidfModel::fit_asts(asts)?;
    let rows = asts.iter().map(|a| model.transform_ast(a)).collect();
    Ok((model, rows))
}
