use std::fmt;

use serde::{Deserialize, Serialize};

/// Node kind labels produced by the parser.
pub mod kind {
    pub const PROGRAM: &str = "Program";
    pub const PROC_DEF: &str = "ProcDef";
    pub const NAME: &str = "Name";
    pub const PARAM: &str = "Param";
    pub const BODY: &str = "Body";
    pub const PEN_DOWN: &str = "PenDown";
    pub const MOVE: &str = "Move";
    pub const TURN: &str = "Turn";
    pub const REPEAT: &str = "Repeat";
    pub const BLOCK: &str = "Block";
    pub const SET: &str = "Set";
    pub const CHANGE: &str = "Change";
    pub const ASK: &str = "Ask";
    pub const CALL: &str = "Call";
    pub const STR: &str = "Str";
    pub const LIT: &str = "Lit";
    pub const PARAM_REF: &str = "ParamRef";
    pub const VAR: &str = "Var";
    pub const ADD: &str = "Add";
    pub const MUL: &str = "Mul";

    /// Every kind label the parser can emit for a non-text node.
    pub const ALL: &[&str] = &[
        PROGRAM, PROC_DEF, NAME, PARAM, BODY, PEN_DOWN, MOVE, TURN, REPEAT, BLOCK, SET, CHANGE,
        ASK, CALL, STR, LIT, PARAM_REF, VAR, ADD, MUL,
    ];
}

/// One node of an ordered labeled tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AstNode {
    pub label: String,
    #[serde(default)]
    pub children: Vec<AstNode>,
}

impl AstNode {
    pub fn new(label: impl Into<String>, children: Vec<AstNode>) -> Self {
        AstNode { label: label.into(), children }
    }

    pub fn leaf(label: impl Into<String>) -> Self {
        AstNode { label: label.into(), children: Vec::new() }
    }

    /// Wraps `text` as the single leaf child of a `kind` node, e.g. `Lit(10)`.
    pub(crate) fn wrap(kind: &str, text: impl Into<String>) -> Self {
        AstNode::new(kind, vec![AstNode::leaf(text)])
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(AstNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(AstNode::depth).max().unwrap_or(0)
    }

    /// Pre-order traversal.
    pub fn descendants(&self) -> Descendants<'_> {
        Descendants { stack: vec![self] }
    }

    /// Text of the single leaf child, for wrapper nodes like `Name(x)`.
    pub fn leaf_text(&self) -> Option<&str> {
        match self.children.as_slice() {
            [only] if only.is_leaf() => Some(&only.label),
            _ => None,
        }
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.descendants().any(|n| n.label == label)
    }
}

pub struct Descendants<'a> {
    stack: Vec<&'a AstNode>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = &'a AstNode;

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

impl fmt::Display for AstNode {
    /// Compact functional notation: `Program(PenDown, Move(Lit(10)))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A parsed program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ast {
    pub root: AstNode,
}

impl Ast {
    pub fn new(root: AstNode) -> Self {
        Ast { root }
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&AstNode> {
        self.root.descendants().filter(|n| n.is_leaf()).collect()
    }

    /// All node labels in pre-order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.root.descendants().map(|n| n.label.as_str())
    }

    /// Renders the tree back to turtle source. Trees that did not come from
    /// the parser fall back to functional notation for unknown shapes.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        if self.root.label == kind::PROGRAM {
            for item in &self.root.children {
                write_stmt(&mut out, item, 0);
            }
        } else {
            out.push_str(&self.root.to_string());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_stmt(out: &mut String, node: &AstNode, level: usize) {
    indent(out, level);
    let c = &node.children;
    match (node.label.as_str(), c.as_slice()) {
        (kind::PROC_DEF, [name, rest @ ..]) if name.label == kind::NAME => {
            out.push_str("to ");
            out.push_str(name.leaf_text().unwrap_or("?"));
            let mut body = None;
            for part in rest {
                match part.label.as_str() {
                    kind::PARAM => {
                        out.push_str(" :");
                        out.push_str(part.leaf_text().unwrap_or("?"));
                    }
                    kind::BODY => body = Some(part),
                    _ => {}
                }
            }
            out.push('\n');
            if let Some(body) = body {
                for s in &body.children {
                    write_stmt(out, s, level + 1);
                }
            }
            indent(out, level);
            out.push_str("end\n");
        }
        (kind::PEN_DOWN, []) => out.push_str("pendown\n"),
        (kind::MOVE, [e]) => {
            out.push_str("move ");
            write_expr(out, e);
            out.push('\n');
        }
        (kind::TURN, [e]) => {
            out.push_str("turn ");
            write_expr(out, e);
            out.push('\n');
        }
        (kind::REPEAT, [count, block]) => {
            out.push_str("repeat ");
            write_expr(out, count);
            out.push_str(" [\n");
            for s in &block.children {
                write_stmt(out, s, level + 1);
            }
            indent(out, level);
            out.push_str("]\n");
        }
        (kind::SET | kind::CHANGE, [name, e]) => {
            out.push_str(if node.label == kind::SET { "set " } else { "change " });
            out.push_str(name.leaf_text().unwrap_or("?"));
            out.push(' ');
            write_expr(out, e);
            out.push('\n');
        }
        (kind::ASK, [prompt, name]) => {
            out.push_str("ask ");
            out.push_str(prompt.leaf_text().unwrap_or("\"\""));
            out.push(' ');
            out.push_str(name.leaf_text().unwrap_or("?"));
            out.push('\n');
        }
        (kind::CALL, [name, args @ ..]) => {
            out.push_str("call ");
            out.push_str(name.leaf_text().unwrap_or("?"));
            for a in args {
                out.push(' ');
                write_expr(out, a);
            }
            out.push('\n');
        }
        _ => {
            out.push_str(&node.to_string());
            out.push('\n');
        }
    }
}

fn write_expr(out: &mut String, node: &AstNode) {
    match (node.label.as_str(), node.children.as_slice()) {
        (kind::LIT | kind::VAR, [_]) => out.push_str(node.leaf_text().unwrap_or("?")),
        (kind::PARAM_REF, [_]) => {
            out.push(':');
            out.push_str(node.leaf_text().unwrap_or("?"));
        }
        (kind::ADD, [l, r]) => {
            write_expr(out, l);
            out.push_str(" + ");
            write_operand(out, r, r.label == kind::ADD);
        }
        (kind::MUL, [l, r]) => {
            write_operand(out, l, l.label == kind::ADD);
            out.push_str(" * ");
            write_operand(out, r, r.label == kind::ADD || r.label == kind::MUL);
        }
        _ => out.push_str(&node.to_string()),
    }
}

// The grammar has no parentheses; they only appear for trees the parser
// cannot produce.
fn write_operand(out: &mut String, node: &AstNode, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, node);
        out.push(')');
    } else {
        write_expr(out, node);
    }
}
