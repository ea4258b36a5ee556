//! Structural rubric predicates for the spiral assignment.
//!
//! The six items were originally graded by hand; here each one is an AST
//! predicate over block kinds. Nothing is executed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ast::{kind, Ast, AstNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RubricItem {
    /// R0: a procedure with exactly one parameter, used as a repeat count.
    ProcedureOneParam,
    /// R1: `pendown` inside a procedure.
    PenDown,
    /// R2: a `set` variable that controls a `move` length.
    VariableInit,
    /// R3: a `repeat` loop.
    RepeatRotations,
    /// R4: `move` and `turn` inside the same loop.
    ForwardTurn,
    /// R5: the length variable is `change`d inside a loop.
    VariableIncrement,
}

pub const RUBRIC_ITEMS: [RubricItem; 6] = [
    RubricItem::ProcedureOneParam,
    RubricItem::PenDown,
    RubricItem::VariableInit,
    RubricItem::RepeatRotations,
    RubricItem::ForwardTurn,
    RubricItem::VariableIncrement,
];

impl RubricItem {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        RUBRIC_ITEMS.get(i).copied()
    }

    /// Short id, `R0`..`R5`.
    pub fn code(self) -> String {
        format!("R{}", self.index())
    }

    pub fn title(self) -> &'static str {
        match self {
            RubricItem::ProcedureOneParam => "Procedure with 1 Parameter",
            RubricItem::PenDown => "Pen Down",
            RubricItem::VariableInit => "Variable Init",
            RubricItem::RepeatRotations => "Repeat Rotations",
            RubricItem::ForwardTurn => "Forward + Turn",
            RubricItem::VariableIncrement => "Variable Increment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RubricScore {
    pub items: [bool; 6],
}

impl RubricScore {
    pub fn new(items: [bool; 6]) -> Self {
        RubricScore { items }
    }

    pub fn overall(&self) -> bool {
        self.items.iter().all(|&b| b)
    }

    pub fn passes(&self, item: RubricItem) -> bool {
        self.items[item.index()]
    }

    /// Bit `i` set when item `i` failed.
    pub fn failed_mask(&self) -> u8 {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .fold(0, |m, (i, _)| m | (1 << i))
    }
}

fn nodes<'a>(root: &'a AstNode, label: &'a str) -> impl Iterator<Item = &'a AstNode> + 'a {
    root.descendants().filter(move |n| n.label == label)
}

fn refers_to(expr: &AstNode, wrapper: &str, name: &str) -> bool {
    nodes(expr, wrapper).any(|n| n.leaf_text() == Some(name))
}

fn repeat_parts(node: &AstNode) -> Option<(&AstNode, &AstNode)> {
    match node.children.as_slice() {
        [count, block] if block.label == kind::BLOCK => Some((count, block)),
        _ => None,
    }
}

fn body(proc_def: &AstNode) -> Option<&AstNode> {
    proc_def.children.iter().find(|c| c.label == kind::BODY)
}

fn procedure_one_param(root: &AstNode) -> bool {
    nodes(root, kind::PROC_DEF).any(|def| {
        let params: Vec<&str> = def
            .children
            .iter()
            .filter(|c| c.label == kind::PARAM)
            .filter_map(AstNode::leaf_text)
            .collect();
        let [param] = params.as_slice() else { return false };
        let Some(body) = body(def) else { return false };
        nodes(body, kind::REPEAT)
            .filter_map(repeat_parts)
            .any(|(count, _)| refers_to(count, kind::PARAM_REF, param))
    })
}

fn pen_down_in_procedure(root: &AstNode) -> bool {
    nodes(root, kind::PROC_DEF)
        .filter_map(body)
        .any(|b| b.contains_label(kind::PEN_DOWN))
}

/// Variables read by some `move` length expression.
fn length_vars(root: &AstNode) -> BTreeSet<&str> {
    nodes(root, kind::MOVE)
        .flat_map(|m| nodes(m, kind::VAR))
        .filter_map(AstNode::leaf_text)
        .collect()
}

fn assigned_name<'a>(stmt: &'a AstNode) -> Option<&'a str> {
    stmt.children.first().filter(|n| n.label == kind::NAME).and_then(AstNode::leaf_text)
}

fn variable_init(root: &AstNode, lengths: &BTreeSet<&str>) -> bool {
    nodes(root, kind::SET).filter_map(assigned_name).any(|v| lengths.contains(v))
}

fn forward_turn(root: &AstNode) -> bool {
    nodes(root, kind::REPEAT)
        .filter_map(repeat_parts)
        .any(|(_, block)| block.contains_label(kind::MOVE) && block.contains_label(kind::TURN))
}

fn variable_increment(root: &AstNode, lengths: &BTreeSet<&str>) -> bool {
    nodes(root, kind::REPEAT).filter_map(repeat_parts).any(|(_, block)| {
        nodes(block, kind::CHANGE).filter_map(assigned_name).any(|v| lengths.contains(v))
    })
}

/// Grades a program against the six rubric items.
pub fn grade_rubric(ast: &Ast) -> RubricScore {
    let root = &ast.root;
    let lengths = length_vars(root);
    RubricScore::new([
        procedure_one_param(root),
        pen_down_in_procedure(root),
        variable_init(root, &lengths),
        nodes(root, kind::REPEAT).next().is_some(),
        forward_turn(root),
        variable_increment(root, &lengths),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turtlelang::parse;

    fn grade(src: &str) -> [bool; 6] {
        grade_rubric(&parse(src).unwrap()).items
    }

    const REFERENCE: &str = "to spiral :n
        pendown
        set len 5
        repeat :n [ move len turn 90 change len 5 ]
      end
      call spiral 20";

    #[test]
    fn reference_solution_passes_everything() {
        let score = grade_rubric(&parse(REFERENCE).unwrap());
        assert_eq!(score.items, [true; 6]);
        assert!(score.overall());
        assert_eq!(score.failed_mask(), 0);
    }

    #[test]
    fn bare_pendown_fails_everything() {
        let score = grade_rubric(&parse("pendown").unwrap());
        assert_eq!(score.items, [false; 6]);
        assert!(!score.overall());
        assert_eq!(score.failed_mask(), 0b11_1111);
    }

    #[test]
    fn literal_repeat_count_fails_only_r0() {
        let s = grade(
            "to spiral :n pendown set len 5 repeat 5 [ move len turn 90 change len 5 ] end call spiral 20",
        );
        assert!(!s[0]);
        assert!(s[3]);
        assert_eq!(s, [false, true, true, true, true, true]);
    }

    #[test]
    fn param_inside_count_expression_counts() {
        let s = grade("to spiral :n pendown repeat :n * 4 [ move 5 turn 90 ] end");
        assert!(s[0]);
    }

    #[test]
    fn two_params_fail_r0() {
        let s = grade("to spiral :n :m pendown repeat :n [ move 5 turn 90 ] end");
        assert!(!s[0]);
        assert!(s[1]);
    }

    #[test]
    fn param_used_only_for_length_fails_r0() {
        let s = grade("to spiral :n pendown repeat 10 [ move :n turn 90 ] end");
        assert!(!s[0]);
    }

    #[test]
    fn local_variable_rotation_count() {
        let s = grade(
            "to spiral ask \"rotations?\" rot pendown set len 5 \
             repeat rot [ move len turn 90 change len 5 ] end call spiral",
        );
        assert_eq!(s, [false, true, true, true, true, true]);
    }

    #[test]
    fn unrolled_loop() {
        let s = grade(
            "to spiral :n pendown set len 5 move len turn 90 change len 5 move len turn 90 change len 5 end",
        );
        assert_eq!(s, [false, true, true, false, false, false]);
    }

    #[test]
    fn pendown_outside_procedure() {
        let s = grade("pendown to spiral :n repeat :n [ move 5 turn 90 ] end");
        assert!(s[0]);
        assert!(!s[1]);
    }

    #[test]
    fn move_and_turn_in_different_loops() {
        let s = grade("repeat 2 [ move 5 ] repeat 2 [ turn 90 ]");
        assert!(!s[4]);
        let s = grade("repeat 2 [ repeat 3 [ move 5 ] turn 90 ]");
        assert!(s[4]);
    }

    #[test]
    fn increment_of_unrelated_variable() {
        let s = grade("set len 5 set k 1 repeat 4 [ move len turn 90 change k 1 ]");
        assert!(s[2]);
        assert!(!s[5]);
    }

    #[test]
    fn set_of_unused_variable_fails_r2() {
        let s = grade("set len 5 repeat 4 [ move 10 turn 90 change len 1 ]");
        assert!(!s[2]);
        assert!(!s[5]);
    }

    #[test]
    fn item_codes() {
        assert_eq!(RubricItem::ForwardTurn.code(), "R4");
        assert_eq!(RubricItem::from_index(5), Some(RubricItem::VariableIncrement));
        assert_eq!(RubricItem::from_index(6), None);
    }
}
