//! One-hidden-layer baseline over TF-IDF rows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{ParamGroup, Parameters};
use super::matrix::{axpy, log_softmax_at, softmax, Matrix};

/// `softmax(W2 · tanh(W1 x + b1) + b2)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcNet {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

impl FcNet {
    pub fn zeros(n_inputs: usize, n_hidden: usize) -> Self {
        FcNet { w1: Matrix::zeros(n_hidden, n_inputs), b1: vec![0.0; n_hidden], w2: Matrix::zeros(2, n_hidden), b2: vec![0.0; 2] }
    }

    pub fn init<R: Rng + ?Sized>(n_inputs: usize, n_hidden: usize, rng: &mut R) -> Self {
        let glorot = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        FcNet {
            w1: Matrix::uniform(n_hidden, n_inputs, glorot(n_inputs, n_hidden), rng),
            b1: vec![0.0; n_hidden],
            w2: Matrix::uniform(2, n_hidden, glorot(n_hidden, 2), rng),
            b2: vec![0.0; 2],
        }
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        let mut h = self.w1.matvec(x);
        for (hi, b) in h.iter_mut().zip(&self.b1) {
            *hi = (*hi + b).tanh();
        }
        h
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut z = self.w2.matvec(h);
        axpy(1.0, &self.b2, &mut z);
        z
    }

    /// `[P(fail), P(all correct)]`
    pub fn predict_proba(&self, x: &[f64]) -> [f64; 2] {
        let p = softmax(&self.logits(&self.hidden(x)));
        [p[0], p[1]]
    }

    pub fn loss(&self, batch: &[&[f64]], labels: &[bool]) -> f64 {
        let total: f64 = batch
            .iter()
            .zip(labels)
            .map(|(x, &y)| -log_softmax_at(&self.logits(&self.hidden(x)), usize::from(y)))
            .sum();
        total / batch.len() as f64
    }

    pub fn loss_and_gradients(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, FcNet) {
        assert!(!batch.is_empty(), "empty batch");
        let mut g = FcNet::zeros(self.w1.cols(), self.w1.rows());
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for (x, &y) in batch.iter().zip(labels) {
            let h = self.hidden(x);
            let z = self.logits(&h);
            let target = usize::from(y);
            loss -= log_softmax_at(&z, target);
            let mut dz = softmax(&z);
            dz[target] -= 1.0;
            dz.iter_mut().for_each(|v| *v *= scale);
            g.w2.add_outer_block(0, &dz, &h);
            axpy(1.0, &dz, &mut g.b2);
            let mut dh = vec![0.0; h.len()];
            self.w2.add_matvec_t_block(0, &dz, &mut dh);
            for (d, hi) in dh.iter_mut().zip(&h) {
                *d *= 1.0 - hi * hi;
            }
            g.w1.add_outer_block(0, &dh, x);
            axpy(1.0, &dh, &mut g.b1);
        }
        (loss * scale, g)
    }
}

impl Parameters for FcNet {
    fn groups_mut(&mut self) -> Vec<ParamGroup<'_>> {
        let (h, d) = self.w1.shape();
        vec![
            ParamGroup::new(self.w1.as_mut_slice(), d),
            ParamGroup::new(&mut self.b1, h),
            ParamGroup::new(self.w2.as_mut_slice(), h),
            ParamGroup::new(&mut self.b2, 2),
        ]
    }

    fn groups(&self) -> Vec<&[f64]> {
        vec![self.w1.as_slice(), &self.b1, self.w2.as_slice(), &self.b2]
    }
}
