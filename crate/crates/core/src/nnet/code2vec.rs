//! The code2vec attention classifier.
//!
//! Each real context slot `i` holding indices `(s, p, e)` becomes
//! `c_i = tanh(W · [T[s]; P[p]; T[e]])`. Attention weights are a softmax of
//! `c_i · a` over real slots, the code vector is `v = Σ α_i c_i`, and the grade
//! distribution is `softmax(W_out · v)`. There are no bias terms, so PAD slots
//! (zero embeddings) give all-zero rows in the context matrix.
//!
//! `W · [x; y; z]` splits into `W_s x + W_p y + W_e z`, so training projects
//! each vocabulary row once per step instead of once per context.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{ParamGroup, Parameters};
use super::matrix::{axpy, dot, log_softmax_at, softmax, Matrix};
use super::NnetError;
use crate::pathctx::{EncodedSubmission, PAD};

const PAD_ROW: &[usize] = &[PAD as usize];

/// All trainable tensors. Also used to hold gradients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Code2VecParams {
    /// `|terminals| × d_emb`
    pub terminal_emb: Matrix,
    /// `|paths| × d_emb`
    pub path_emb: Matrix,
    /// `d_hidden × 3·d_emb`
    pub combine: Matrix,
    /// `d_hidden`
    pub attention: Vec<f64>,
    /// `2 × d_hidden`
    pub output: Matrix,
}

/// Result of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    /// `C × d_hidden`; rows of PAD slots are zero.
    pub context_matrix: Matrix,
    /// Attention weight per slot; zero for PAD slots.
    pub attention: Vec<f64>,
    pub code_vector: Vec<f64>,
    /// `[P(fail), P(all correct)]`
    pub probs: [f64; 2],
}

/// Vocabulary rows pushed through the three column blocks of `combine`.
struct Projected {
    start: Matrix,
    path: Matrix,
    end: Matrix,
}

impl Code2VecParams {
    pub fn zeros(n_terminals: usize, n_paths: usize, d_emb: usize, d_hidden: usize) -> Self {
        Code2VecParams {
            terminal_emb: Matrix::zeros(n_terminals, d_emb),
            path_emb: Matrix::zeros(n_paths, d_emb),
            combine: Matrix::zeros(d_hidden, 3 * d_emb),
            attention: vec![0.0; d_hidden],
            output: Matrix::zeros(2, d_hidden),
        }
    }

    /// Embeddings ~ `U(-0.05, 0.05)`, dense layers Glorot-uniform, PAD rows zero.
    pub fn init<R: Rng + ?Sized>(n_terminals: usize, n_paths: usize, d_emb: usize, d_hidden: usize, rng: &mut R) -> Self {
        let glorot = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        let mut p = Code2VecParams {
            terminal_emb: Matrix::uniform(n_terminals, d_emb, 0.05, rng),
            path_emb: Matrix::uniform(n_paths, d_emb, 0.05, rng),
            combine: Matrix::uniform(d_hidden, 3 * d_emb, glorot(3 * d_emb, d_hidden), rng),
            attention: Matrix::uniform(1, d_hidden, glorot(d_hidden, 1), rng).into_vec(),
            output: Matrix::uniform(2, d_hidden, glorot(d_hidden, 2), rng),
        };
        p.terminal_emb.row_mut(PAD as usize).fill(0.0);
        p.path_emb.row_mut(PAD as usize).fill(0.0);
        p
    }

    pub fn d_emb(&self) -> usize {
        self.terminal_emb.cols()
    }

    pub fn d_hidden(&self) -> usize {
        self.combine.rows()
    }

    pub fn n_terminals(&self) -> usize {
        self.terminal_emb.rows()
    }

    pub fn n_paths(&self) -> usize {
        self.path_emb.rows()
    }

    pub fn all_finite(&self) -> bool {
        self.groups().iter().all(|g| g.iter().all(|x| x.is_finite()))
    }

    /// Rejects inputs that index past the embedding tables.
    pub fn check_input(&self, enc: &EncodedSubmission) -> Result<(), NnetError> {
        for (ctx, &real) in enc.contexts.iter().zip(&enc.mask) {
            if !real {
                continue;
            }
            let [s, p, e] = *ctx;
            if s as usize >= self.n_terminals() || e as usize >= self.n_terminals() || p as usize >= self.n_paths() {
                return Err(NnetError::VocabMismatch(format!(
                    "context ({s}, {p}, {e}) outside vocab of {} terminals / {} paths",
                    self.n_terminals(),
                    self.n_paths()
                )));
            }
        }
        Ok(())
    }

    fn project(&self) -> Projected {
        let d = self.d_emb();
        Projected {
            start: self.combine.project_rows_block(0, &self.terminal_emb),
            path: self.combine.project_rows_block(d, &self.path_emb),
            end: self.combine.project_rows_block(2 * d, &self.terminal_emb),
        }
    }

    /// `(slot, c_i)` for the real slots of `enc`.
    fn contexts(&self, proj: &Projected, enc: &EncodedSubmission) -> Vec<(usize, Vec<f64>)> {
        enc.contexts
            .iter()
            .zip(&enc.mask)
            .enumerate()
            .filter(|(_, (_, &real))| real)
            .map(|(slot, (&[s, p, e], _))| {
                let mut c = proj.start.row(s as usize).to_vec();
                axpy(1.0, proj.path.row(p as usize), &mut c);
                axpy(1.0, proj.end.row(e as usize), &mut c);
                c.iter_mut().for_each(|x| *x = x.tanh());
                (slot, c)
            })
            .collect()
    }

    fn pool(&self, rows: &[(usize, Vec<f64>)]) -> (Vec<f64>, Vec<f64>) {
        let h = self.d_hidden();
        if rows.is_empty() {
            return (Vec::new(), vec![0.0; h]);
        }
        let scores: Vec<f64> = rows.iter().map(|(_, c)| dot(c, &self.attention)).collect();
        let alpha = softmax(&scores);
        let mut v = vec![0.0; h];
        for ((_, c), &a) in rows.iter().zip(&alpha) {
            axpy(a, c, &mut v);
        }
        (alpha, v)
    }

    fn forward_with(&self, proj: &Projected, enc: &EncodedSubmission) -> Forward {
        let rows = self.contexts(proj, enc);
        let (alpha, v) = self.pool(&rows);
        let probs = softmax(&self.output.matvec(&v));
        let mut context_matrix = Matrix::zeros(enc.len(), self.d_hidden());
        let mut attention = vec![0.0; enc.len()];
        for ((slot, c), a) in rows.iter().zip(alpha) {
            context_matrix.row_mut(*slot).copy_from_slice(c);
            attention[*slot] = a;
        }
        Forward { context_matrix, attention, code_vector: v, probs: [probs[0], probs[1]] }
    }

    /// Forward pass for one submission. An all-PAD input yields a zero code
    /// vector and the uniform distribution.
    pub fn forward(&self, enc: &EncodedSubmission) -> Result<Forward, NnetError> {
        self.check_input(enc)?;
        Ok(self.forward_with(&self.project(), enc))
    }

    /// Forward passes sharing one projection of the vocabulary.
    pub fn forward_batch(&self, batch: &[&EncodedSubmission]) -> Result<Vec<Forward>, NnetError> {
        for enc in batch {
            self.check_input(enc)?;
        }
        let proj = self.project();
        Ok(batch.iter().map(|enc| self.forward_with(&proj, enc)).collect())
    }

    /// Mean cross-entropy over the batch (label `true` = all rubric items
    /// correct) and its gradient for every tensor. PAD rows get zero gradient.
    pub fn loss_and_gradients(&self, batch: &[&EncodedSubmission], labels: &[bool]) -> (f64, Code2VecParams) {
        assert!(!batch.is_empty(), "empty batch");
        assert_eq!(batch.len(), labels.len());
        let (d, h) = (self.d_emb(), self.d_hidden());
        let proj = self.project();
        let mut grads = Code2VecParams::zeros(self.n_terminals(), self.n_paths(), d, h);
        // Gradients w.r.t. the projected tables.
        let mut g_start = Matrix::zeros(self.n_terminals(), h);
        let mut g_path = Matrix::zeros(self.n_paths(), h);
        let mut g_end = Matrix::zeros(self.n_terminals(), h);
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;

        for (enc, &label) in batch.iter().zip(labels) {
            let rows = self.contexts(&proj, enc);
            let (alpha, v) = self.pool(&rows);
            let logits = self.output.matvec(&v);
            let target = usize::from(label);
            loss -= log_softmax_at(&logits, target);

            let mut dlogits = softmax(&logits);
            dlogits[target] -= 1.0;
            dlogits.iter_mut().for_each(|x| *x *= scale);
            grads.output.add_outer_block(0, &dlogits, &v);
            if rows.is_empty() {
                continue;
            }
            let mut dv = vec![0.0; h];
            self.output.add_matvec_t_block(0, &dlogits, &mut dv);

            let u: Vec<f64> = rows.iter().map(|(_, c)| dot(&dv, c)).collect();
            let u_bar: f64 = alpha.iter().zip(&u).map(|(a, u)| a * u).sum();
            for (((slot, c), &a), &ui) in rows.iter().zip(&alpha).zip(&u) {
                let dscore = a * (ui - u_bar);
                axpy(dscore, c, &mut grads.attention);
                let dz: Vec<f64> = (0..h)
                    .map(|k| (a * dv[k] + dscore * self.attention[k]) * (1.0 - c[k] * c[k]))
                    .collect();
                let [s, p, e] = enc.contexts[*slot];
                axpy(1.0, &dz, g_start.row_mut(s as usize));
                axpy(1.0, &dz, g_path.row_mut(p as usize));
                axpy(1.0, &dz, g_end.row_mut(e as usize));
            }
        }

        let c = &self.combine;
        back_project(c, &g_start, &self.terminal_emb, 0, &mut grads.combine, &mut grads.terminal_emb);
        back_project(c, &g_path, &self.path_emb, d, &mut grads.combine, &mut grads.path_emb);
        back_project(c, &g_end, &self.terminal_emb, 2 * d, &mut grads.combine, &mut grads.terminal_emb);
        grads.terminal_emb.row_mut(PAD as usize).fill(0.0);
        grads.path_emb.row_mut(PAD as usize).fill(0.0);
        (loss * scale, grads)
    }

    /// Mean cross-entropy without gradients.
    pub fn loss(&self, batch: &[&EncodedSubmission], labels: &[bool]) -> f64 {
        let proj = self.project();
        let total: f64 = batch
            .iter()
            .zip(labels)
            .map(|(enc, &y)| {
                let rows = self.contexts(&proj, enc);
                let (_, v) = self.pool(&rows);
                -log_softmax_at(&self.output.matvec(&v), usize::from(y))
            })
            .sum();
        total / batch.len() as f64
    }
}

/// Pushes table gradients `g` back onto one column block of `combine` and
/// onto the embedding rows that were projected through it.
fn back_project(combine: &Matrix, g: &Matrix, emb: &Matrix, col0: usize, combine_grad: &mut Matrix, emb_grad: &mut Matrix) {
    combine_grad.add_gram_block(col0, g, emb);
    combine.add_back_block(col0, g, emb_grad);
}

impl Parameters for Code2VecParams {
    fn groups_mut(&mut self) -> Vec<ParamGroup<'_>> {
        let d = self.d_emb();
        let h = self.d_hidden();
        vec![
            ParamGroup::frozen(self.terminal_emb.as_mut_slice(), d, PAD_ROW),
            ParamGroup::frozen(self.path_emb.as_mut_slice(), d, PAD_ROW),
            ParamGroup::new(self.combine.as_mut_slice(), 3 * d),
            ParamGroup::new(&mut self.attention, h),
            ParamGroup::new(self.output.as_mut_slice(), h),
        ]
    }

    fn groups(&self) -> Vec<&[f64]> {
        vec![
            self.terminal_emb.as_slice(),
            self.path_emb.as_slice(),
            self.combine.as_slice(),
            &self.attention,
            self.output.as_slice(),
        ]
    }
}
