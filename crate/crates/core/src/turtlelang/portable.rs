//! Portable JSON trees: `{"label": <string>, "children": [<node>...]}`.

use serde_json::Value;

use super::ast::{Ast, AstNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Node { path: String, message: String },
}

fn node_error(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError::Node { path: path.to_string(), message: message.into() }
}

pub fn to_portable(ast: &Ast) -> String {
    serde_json::to_string(&ast.root).expect("tree serialization is infallible")
}

pub fn from_portable(text: &str) -> Result<Ast, SchemaError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SchemaError::Json(e.to_string()))?;
    node_from_value(&value, "$").map(Ast::new)
}

/// Validates a portable tree already decoded as JSON (e.g. inside a corpus file).
pub(crate) fn node_from_value(value: &Value, path: &str) -> Result<AstNode, SchemaError> {
    let obj = value.as_object().ok_or_else(|| node_error(path, "node must be an object"))?;
    if let Some(key) = obj.keys().find(|k| *k != "label" && *k != "children") {
        return Err(node_error(path, format!("unknown field `{key}`")));
    }
    let label = match obj.get("label") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(node_error(path, "`label` must be a string")),
        None => return Err(node_error(path, "missing `label`")),
    };
    let children = match obj.get("children") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, c)| node_from_value(c, &format!("{path}.children[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(node_error(path, "`children` must be an array")),
    };
    if children.is_empty() && label.is_empty() {
        return Err(node_error(path, "leaf label must be non-empty"));
    }
    Ok(AstNode { label, children })
}
