use serde::{Deserialize, Serialize};

use super::paths::PathContext;
use super::vocab::Vocab;

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;

/// Exactly `max_contexts` (start, path, end) index triples; unused slots are
/// PAD triples with a false mask entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodedSubmission {
    pub contexts: Vec<[u32; 3]>,
    pub mask: Vec<bool>,
    /// More contexts were extracted than fit.
    pub truncated: bool,
}

impl EncodedSubmission {
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn real_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// A submission with no real contexts.
    pub fn all_pad(max_contexts: usize) -> Self {
        EncodedSubmission { contexts: vec![[PAD; 3]; max_contexts], mask: vec![false; max_contexts], truncated: false }
    }
}

/// Keeps the first `max_contexts` contexts in extraction order.
pub fn encode(paths: &[PathContext], vocab: &Vocab, max_contexts: usize) -> EncodedSubmission {
    assert!(max_contexts >= 1, "max_contexts must be positive");
    let mut enc = EncodedSubmission::all_pad(max_contexts);
    for (slot, ctx) in paths.iter().take(max_contexts).enumerate() {
        enc.contexts[slot] = [vocab.terminal(&ctx.start), vocab.path(&ctx.path_key()), vocab.terminal(&ctx.end)];
        enc.mask[slot] = true;
    }
    enc.truncated = paths.len() > max_contexts;
    enc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathctx::{build_vocab, Direction};

    fn ctx(i: usize) -> PathContext {
        PathContext { start: format!("t{i}"), path: vec![("R".into(), Direction::Up)], end: "e".into() }
    }

    #[test]
    fn one_context_padded() {
        let doc = vec![ctx(0)];
        let v = build_vocab([doc.as_slice()], 1).unwrap();
        let e = encode(&doc, &v, 100);
        assert_eq!(e.len(), 100);
        assert_eq!(e.real_count(), 1);
        assert!(!e.truncated);
        assert_eq!(e.contexts[0], [v.terminal("t0"), v.path("R↑"), v.terminal("e")]);
        assert!(e.contexts[1..].iter().all(|c| *c == [PAD; 3]));
    }

    #[test]
    fn overflow_truncates() {
        let doc: Vec<_> = (0..150).map(ctx).collect();
        let v = build_vocab([doc.as_slice()], 1).unwrap();
        let e = encode(&doc, &v, 100);
        assert_eq!(e.real_count(), 100);
        assert!(e.truncated);
        assert_eq!(e.contexts[99][0], v.terminal("t99"));
    }

    #[test]
    fn empty_is_all_pad() {
        let v = Vocab::from_tokens(vec![], vec![]);
        let e = encode(&[], &v, 5);
        assert_eq!(e, EncodedSubmission::all_pad(5));
    }
}
