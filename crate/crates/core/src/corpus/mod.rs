//! Corpus files and the synthetic corpus generator.
//!
//! ```json
//! {"submissions": [{"id": "s0000", "source": "pendown", "rubric": [false, ...], "overall": false}]}
//! ```
//!
//! Each submission carries exactly one of `source` (turtle text) or `ast`
//! (portable tree).

mod generator;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::turtlelang::{self, grade_rubric, Ast, RubricScore, SchemaError, SyntaxError};

pub use generator::{generate, GeneratedCorpus, GeneratorSpec, GroundTruth, Group};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid corpus JSON: {0}")]
    Json(String),
    #[error("submission {index}: {message}")]
    Field { index: usize, message: String },
    #[error("submission `{id}`: {source}")]
    Syntax { id: String, source: SyntaxError },
    #[error("submission `{id}`: {source}")]
    Tree { id: String, source: SchemaError },
    #[error("duplicate submission id `{0}`")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submission {
    pub id: String,
    /// Original text when the submission was given as source.
    pub source: Option<String>,
    pub ast: Ast,
    pub rubric: RubricScore,
}

impl Submission {
    /// Parses `source` and grades it.
    pub fn from_source(id: impl Into<String>, source: impl Into<String>) -> Result<Self, CorpusError> {
        let id = id.into();
        let source = source.into();
        let ast = turtlelang::parse(&source).map_err(|e| CorpusError::Syntax { id: id.clone(), source: e })?;
        let rubric = grade_rubric(&ast);
        Ok(Submission { id, source: Some(source), ast, rubric })
    }

    pub fn overall(&self) -> bool {
        self.rubric.overall()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub submissions: Vec<Submission>,
}

#[derive(Serialize, Deserialize)]
struct SubmissionRecord {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ast: Option<Value>,
    rubric: Vec<bool>,
    overall: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusRecord {
    submissions: Vec<Value>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.submissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.submissions.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.submissions.iter().map(Submission::overall).collect()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.submissions.iter().map(|s| s.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&Submission> {
        self.submissions.iter().find(|s| s.id == id)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<SubmissionRecord> = self
            .submissions
            .iter()
            .map(|s| SubmissionRecord {
                id: s.id.clone(),
                source: s.source.clone(),
                ast: match s.source {
                    Some(_) => None,
                    None => Some(serde_json::to_value(&s.ast.root).expect("tree serializes")),
                },
                rubric: s.rubric.items.to_vec(),
                overall: s.overall(),
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&serde_json::json!({ "submissions": records }))
            .expect("corpus serializes");
        out.push('\n');
        out
    }

    /// Loads and validates a corpus. The stored rubric is kept as given; an
    /// `overall` flag that disagrees with the rubric items is rejected.
    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let record: CorpusRecord = serde_json::from_str(text).map_err(|e| CorpusError::Json(e.to_string()))?;
        let mut seen = HashSet::new();
        let mut submissions = Vec::with_capacity(record.submissions.len());
        for (index, raw) in record.submissions.into_iter().enumerate() {
            let field = |message: String| CorpusError::Field { index, message };
            if let Some(obj) = raw.as_object() {
                if let Some(k) = obj.keys().find(|k| !["id", "source", "ast", "rubric", "overall"].contains(&k.as_str())) {
                    return Err(field(format!("unknown field `{k}`")));
                }
            }
            let rec: SubmissionRecord = serde_json::from_value(raw).map_err(|e| field(e.to_string()))?;
            let ast = match (&rec.source, &rec.ast) {
                (Some(src), None) => turtlelang::parse(src).map_err(|e| CorpusError::Syntax { id: rec.id.clone(), source: e })?,
                (None, Some(tree)) => Ast::new(
                    turtlelang::portable::node_from_value(tree, "$")
                        .map_err(|e| CorpusError::Tree { id: rec.id.clone(), source: e })?,
                ),
                _ => return Err(field("exactly one of `source` and `ast` is required".into())),
            };
            let items: [bool; 6] = rec
                .rubric
                .as_slice()
                .try_into()
                .map_err(|_| field(format!("`rubric` needs 6 entries, found {}", rec.rubric.len())))?;
            let rubric = RubricScore::new(items);
            if rubric.overall() != rec.overall {
                return Err(field("`overall` must equal the AND of the rubric items".into()));
            }
            if !seen.insert(rec.id.clone()) {
                return Err(CorpusError::DuplicateId(rec.id));
            }
            submissions.push(Submission { id: rec.id, source: rec.source, ast, rubric });
        }
        Ok(Corpus { submissions })
    }
}
