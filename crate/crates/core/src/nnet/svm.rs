//! Linear SVM trained on the L2-regularized hinge loss.

use serde::{Deserialize, Serialize};

use super::adam::{ParamGroup, Parameters};
use super::matrix::{axpy, dot};

/// Decision score `w · x + b`; positive scores predict "all correct".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    /// Regularization strength; not trained.
    #[serde(default)]
    pub lambda: f64,
}

impl LinearSvm {
    pub fn zeros(n_inputs: usize, lambda: f64) -> Self {
        LinearSvm { weights: vec![0.0; n_inputs], bias: vec![0.0], lambda }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias[0]
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }

    /// Mean hinge loss alone.
    pub fn hinge(&self, batch: &[&[f64]], labels: &[bool]) -> f64 {
        let total: f64 = batch
            .iter()
            .zip(labels)
            .map(|(x, &y)| (1.0 - sign(y) * self.decision(x)).max(0.0))
            .sum();
        total / batch.len() as f64
    }

    /// Mean hinge loss plus `λ‖w‖²`.
    pub fn objective(&self, batch: &[&[f64]], labels: &[bool]) -> f64 {
        self.hinge(batch, labels) + self.lambda * dot(&self.weights, &self.weights)
    }

    /// Objective and its subgradient (zero on the hinge kink).
    pub fn loss_and_gradients(&self, batch: &[&[f64]], labels: &[bool]) -> (f64, LinearSvm) {
        assert!(!batch.is_empty(), "empty batch");
        let mut g = LinearSvm::zeros(self.weights.len(), self.lambda);
        let scale = 1.0 / batch.len() as f64;
        let mut hinge = 0.0;
        for (x, &y) in batch.iter().zip(labels) {
            let margin = 1.0 - sign(y) * self.decision(x);
            if margin > 0.0 {
                hinge += margin;
                axpy(-sign(y) * scale, x, &mut g.weights);
                g.bias[0] -= sign(y) * scale;
            }
        }
        axpy(2.0 * self.lambda, &self.weights, &mut g.weights);
        (hinge * scale + self.lambda * dot(&self.weights, &self.weights), g)
    }
}

fn sign(label: bool) -> f64 {
    if label {
        1.0
    } else {
        -1.0
    }
}

impl Parameters for LinearSvm {
    fn groups_mut(&mut self) -> Vec<ParamGroup<'_>> {
        let d = self.weights.len();
        vec![ParamGroup::new(&mut self.weights, d), ParamGroup::new(&mut self.bias, 1)]
    }

    fn groups(&self) -> Vec<&[f64]> {
        vec![&self.weights, &self.bias]
    }
}
