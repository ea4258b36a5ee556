use std::fmt;

use serde::{Deserialize, Serialize};

use crate::turtlelang::{Ast, AstNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

/// A leaf-to-leaf path: start terminal, the internal nodes between the two
/// leaves (ascending to and including the lowest common ancestor, then
/// descending), and the end terminal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathContext {
    pub start: String,
    pub path: Vec<(String, Direction)>,
    pub end: String,
}

impl PathContext {
    /// Key identifying the internal path in the path vocabulary.
    pub fn path_key(&self) -> String {
        let mut key = String::new();
        for (i, (label, dir)) in self.path.iter().enumerate() {
            if i > 0 {
                key.push(' ');
            }
            key.push_str(label);
            key.push(match dir {
                Direction::Up => '↑',
                Direction::Down => '↓',
            });
        }
        key
    }
}

impl fmt::Display for PathContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.start, self.path_key(), self.end)
    }
}

/// Collects each leaf together with its chain of ancestors (root first).
fn leaf_chains<'a>(node: &'a AstNode, chain: &mut Vec<&'a AstNode>, out: &mut Vec<(&'a AstNode, Vec<&'a AstNode>)>) {
    if node.is_leaf() {
        out.push((node, chain.clone()));
        return;
    }
    chain.push(node);
    for c in &node.children {
        leaf_chains(c, chain, out);
    }
    chain.pop();
}

/// Every leaf pair at most `max_width` apart in leaf order whose connecting
/// path has at most `max_length` internal nodes, ordered by (start, end) leaf
/// position.
pub fn extract_paths(ast: &Ast, max_length: usize, max_width: usize) -> Vec<PathContext> {
    let mut leaves = Vec::new();
    leaf_chains(&ast.root, &mut Vec::new(), &mut leaves);
    let mut out = Vec::new();
    for i in 0..leaves.len() {
        let (start, up_chain) = &leaves[i];
        for (end, down_chain) in leaves.iter().take((i + max_width).saturating_add(1)).skip(i + 1) {
            let shared = up_chain
                .iter()
                .zip(down_chain)
                .take_while(|(a, b)| std::ptr::eq(**a, **b))
                .count();
            // shared >= 1: the root is a common ancestor of distinct leaves.
            let lca = shared - 1;
            let internal = (up_chain.len() - lca) + (down_chain.len() - shared);
            if internal > max_length {
                continue;
            }
            let mut path = Vec::with_capacity(internal);
            for n in up_chain[lca..].iter().rev() {
                path.push((n.label.clone(), Direction::Up));
            }
            for n in &down_chain[shared..] {
                path.push((n.label.clone(), Direction::Down));
            }
            out.push(PathContext { start: start.label.clone(), path, end: end.label.clone() });
        }
    }
    out
}
