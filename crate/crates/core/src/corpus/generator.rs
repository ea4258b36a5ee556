//! Synthetic spiral-assignment corpora with planted misconception groups.
//!
//! - `Correct`: reference solutions with cosmetic variation.
//! - `A`: the loop is unrolled into repeated move/turn pairs.
//! - `B`: the loop repeats a fixed number of times instead of using the parameter.
//! - `C`: the rotation count comes from a local variable instead of a parameter.
//!
//! Group labels are returned separately from the corpus so they never reach
//! the training or discovery inputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, Submission};
use crate::nnet::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    Correct,
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub correct: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "C")]
    pub c: usize,
    /// Upper bound on extra statements added to a program.
    pub max_jitter: usize,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec { correct: 80, a: 10, b: 8, c: 3, max_jitter: 3, seed: 0 }
    }
}

/// Quarantined ground truth: submission id → planted group.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub groups: BTreeMap<String, Group>,
}

impl GroundTruth {
    pub fn members(&self, group: Group) -> Vec<&str> {
        self.groups.iter().filter(|(_, &g)| g == group).map(|(id, _)| id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedCorpus {
    pub corpus: Corpus,
    pub truth: GroundTruth,
}

const PROC_NAMES: &[&str] = &["spiral", "square", "draw", "shape", "squiral"];
const PARAM_NAMES: &[&str] = &["n", "size", "rotations", "count", "times"];
const LEN_NAMES: &[&str] = &["len", "length", "side", "dist", "step"];
const COUNT_VARS: &[&str] = &["rotations", "rounds", "num", "total"];
const PROMPTS: &[&str] = &["\"How many rotations?\"", "\"size?\"", "\"Enter a number\""];
const JUNK_VARS: &[&str] = &["color", "speed", "x", "answer", "temp"];

/// Surface choices shared by every template.
struct Names {
    proc_name: &'static str,
    param: &'static str,
    len: &'static str,
    angle: i64,
    start: i64,
    inc: i64,
    rotations: i64,
}

impl Names {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        Names {
            proc_name: PROC_NAMES.choose(rng).unwrap(),
            param: PARAM_NAMES.choose(rng).unwrap(),
            len: LEN_NAMES.choose(rng).unwrap(),
            angle: *[90, 90, 90, 91, 89].choose(rng).unwrap(),
            start: rng.random_range(1..=10),
            inc: rng.random_range(1..=10),
            rotations: rng.random_range(10..=40),
        }
    }

    fn loop_body(&self) -> Vec<String> {
        vec![format!("move {}", self.len), format!("turn {}", self.angle), format!("change {} {}", self.len, self.inc)]
    }

    fn setup(&self, init: &str) -> Vec<String> {
        vec!["pendown".into(), format!("set {} {init}", self.len)]
    }
}

struct Program {
    /// Top-level statements and procedure definitions.
    items: Vec<String>,
}

impl Program {
    fn procedure(header: String, body: Vec<String>) -> String {
        let mut text = header;
        text.push('\n');
        for s in body {
            for line in s.lines() {
                let _ = writeln!(text, "  {line}");
            }
        }
        text.push_str("end");
        text
    }

    fn repeat(count: &str, body: &[String]) -> String {
        let mut text = format!("repeat {count} [\n");
        for s in body {
            let _ = writeln!(text, "  {s}");
        }
        text.push(']');
        text
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(item);
            out.push('\n');
        }
        out
    }
}

// Each template fixes the program structure; names, literals and the
// number of unrolled copies vary.

fn correct(rng: &mut ChaCha8Rng) -> Program {
    let n = Names::draw(rng);
    let mut body = n.setup(&n.start.to_string());
    body.push(Program::repeat(&format!(":{}", n.param), &n.loop_body()));
    Program {
        items: vec![
            Program::procedure(format!("to {} :{}", n.proc_name, n.param), body),
            format!("call {} {}", n.proc_name, n.rotations),
        ],
    }
}

/// Misconception A: the loop body copied out by hand, no `repeat`.
fn unrolled(rng: &mut ChaCha8Rng) -> Program {
    let n = Names::draw(rng);
    let mut body = n.setup(&n.start.to_string());
    for _ in 0..rng.random_range(3..=5) {
        body.extend(n.loop_body());
    }
    Program {
        items: vec![
            Program::procedure(format!("to {} :{}", n.proc_name, n.param), body),
            format!("call {} {}", n.proc_name, n.rotations),
        ],
    }
}

/// Misconception B: the parameter exists but the loop count is a literal.
fn fixed_count(rng: &mut ChaCha8Rng) -> Program {
    let n = Names::draw(rng);
    let mut body = n.setup(&n.start.to_string());
    body.push(Program::repeat(&n.rotations.to_string(), &n.loop_body()));
    Program {
        items: vec![
            Program::procedure(format!("to {} :{}", n.proc_name, n.param), body),
            format!("call {} {}", n.proc_name, rng.random_range(10..=40)),
        ],
    }
}

/// Misconception C: the count is asked for into a local variable instead of
/// being passed as a parameter.
fn local_count(rng: &mut ChaCha8Rng) -> Program {
    let n = Names::draw(rng);
    let count = COUNT_VARS.choose(rng).unwrap();
    let mut body = n.setup(&n.start.to_string());
    body.insert(1, format!("ask {} {count}", PROMPTS.choose(rng).unwrap()));
    body.push(Program::repeat(count, &n.loop_body()));
    Program { items: vec![Program::procedure(format!("to {}", n.proc_name), body), format!("call {}", n.proc_name)] }
}

/// Up to `max` extra top-level statements after the program. None of them
/// changes a rubric outcome.
fn jitter(program: &mut Program, max: usize, rng: &mut ChaCha8Rng) {
    let extra = rng.random_range(0..=max);
    for _ in 0..extra {
        let stmt = match rng.random_range(0..4) {
            0 => format!("set {} {}", JUNK_VARS.choose(rng).unwrap(), rng.random_range(0..=100)),
            1 => format!("turn {}", rng.random_range(0..=360)),
            2 => format!("move {}", rng.random_range(0..=50)),
            _ => format!("ask \"Ready?\" {}", JUNK_VARS.choose(rng).unwrap()),
        };
        program.items.push(stmt);
    }
}

const TEMPLATE_STREAM: u64 = 10;
const ORDER_STREAM: u64 = 11;

/// Generates a graded corpus. Submissions are shuffled before ids are
/// assigned, so neither order nor id reveals the group.
pub fn generate(spec: &GeneratorSpec) -> GeneratedCorpus {
    let mut rng = stream_rng(spec.seed, TEMPLATE_STREAM);
    let plan = [(Group::Correct, spec.correct), (Group::A, spec.a), (Group::B, spec.b), (Group::C, spec.c)];
    let mut programs = Vec::new();
    for (group, count) in plan {
        for _ in 0..count {
            let mut p = match group {
                Group::Correct => correct(&mut rng),
                Group::A => unrolled(&mut rng),
                Group::B => fixed_count(&mut rng),
                Group::C => local_count(&mut rng),
            };
            jitter(&mut p, spec.max_jitter, &mut rng);
            programs.push((group, p.render()));
        }
    }
    programs.shuffle(&mut stream_rng(spec.seed, ORDER_STREAM));

    let width = programs.len().max(1).to_string().len().max(4);
    let mut corpus = Corpus::default();
    let mut truth = GroundTruth::default();
    for (i, (group, source)) in programs.into_iter().enumerate() {
        let id = format!("s{i:0width$}");
        let sub = Submission::from_source(id.clone(), source).expect("generated programs parse");
        corpus.submissions.push(sub);
        truth.groups.insert(id, group);
    }
    GeneratedCorpus { corpus, truth }
}
