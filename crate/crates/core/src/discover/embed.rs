use serde::{Deserialize, Serialize};

use crate::nnet::{Code2VecParams, NnetError};
use crate::pathctx::EncodedSubmission;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    /// Row-major flattening of the pre-attention context matrix (C · d_hidden).
    #[default]
    Flattened,
    /// The attention-pooled code vector (d_hidden).
    CodeVector,
}

/// One embedding per encoded submission, in input order.
pub fn extract_embeddings(
    model: &Code2VecParams,
    encoded: &[EncodedSubmission],
    kind: EmbeddingKind,
) -> Result<Vec<Vec<f64>>, NnetError> {
    let refs: Vec<&EncodedSubmission> = encoded.iter().collect();
    let fwd = model.forward_batch(&refs)?;
    Ok(fwd
        .into_iter()
        .map(|f| match kind {
            EmbeddingKind::Flattened => f.context_matrix.into_vec(),
            EmbeddingKind::CodeVector => f.code_vector,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnet::stream_rng;

    fn enc(contexts: &[[u32; 3]], c: usize) -> EncodedSubmission {
        let mut e = EncodedSubmission::all_pad(c);
        for (i, ctx) in contexts.iter().enumerate() {
            e.contexts[i] = *ctx;
            e.mask[i] = true;
        }
        e
    }

    #[test]
    fn shape_and_pad_segments() {
        let model = Code2VecParams::init(6, 5, 4, 3, &mut stream_rng(1, 1));
        let inputs = [enc(&[[2, 3, 4]], 5), enc(&[[2, 3, 4], [5, 2, 3]], 5), enc(&[[2, 3, 4]], 5)];
        let e = extract_embeddings(&model, &inputs, EmbeddingKind::Flattened).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|v| v.len() == 15));
        assert!(e[0][3..].iter().all(|&x| x == 0.0));
        assert!(e[1][6..].iter().all(|&x| x == 0.0));
        assert!(e[1][..6].iter().any(|&x| x != 0.0));
        assert_eq!(e[0], e[2]);
        let pooled = extract_embeddings(&model, &inputs, EmbeddingKind::CodeVector).unwrap();
        assert_eq!(pooled[0].len(), 3);
    }

    #[test]
    fn out_of_vocab_rejected() {
        let model = Code2VecParams::init(3, 3, 2, 2, &mut stream_rng(1, 1));
        let r = extract_embeddings(&model, &[enc(&[[9, 1, 1]], 2)], EmbeddingKind::Flattened);
        assert!(matches!(r, Err(NnetError::VocabMismatch(_))));
    }
}
