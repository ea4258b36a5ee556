//! A small turtle-graphics language standing in for block-based programs.
//!
//! ```text
//! to spiral :n
//!   pendown
//!   set len 5
//!   repeat :n [ move len turn 90 change len 5 ]
//! end
//! call spiral 20
//! ```
//!
//! Programs parse into an ordered labeled tree ([`Ast`]). Internal nodes carry
//! a node kind (`ProcDef`, `Repeat`, `Move`, ...); leaves carry either a kind
//! with no operands (`PenDown`) or the literal / identifier text itself.

mod ast;
mod parser;
pub(crate) mod portable;
mod rubric;
mod ted;

pub use ast::{kind, Ast, AstNode};
pub use parser::{parse, SyntaxError};
pub use portable::{from_portable, to_portable, SchemaError};
pub use rubric::{grade_rubric, RubricItem, RubricScore, RUBRIC_ITEMS};
pub use ted::{tree_edit_distance, PreparedTree};
