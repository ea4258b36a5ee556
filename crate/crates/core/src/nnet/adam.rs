use serde::{Deserialize, Serialize};

/// One trainable tensor viewed as flat storage. Rows listed in
/// `frozen_rows` are never written by the optimizer.
pub struct ParamGroup<'a> {
    pub values: &'a mut [f64],
    pub row_len: usize,
    pub frozen_rows: &'static [usize],
}

impl<'a> ParamGroup<'a> {
    pub fn new(values: &'a mut [f64], row_len: usize) -> Self {
        ParamGroup { values, row_len, frozen_rows: &[] }
    }

    pub fn frozen(values: &'a mut [f64], row_len: usize, frozen_rows: &'static [usize]) -> Self {
        ParamGroup { values, row_len, frozen_rows }
    }
}

/// A set of tensors that can be optimized. Gradients are represented by the
/// same type, so `groups` of a gradient lines up with `groups_mut` of the
/// parameters.
pub trait Parameters {
    fn groups_mut(&mut self) -> Vec<ParamGroup<'_>>;

    /// Flat read-only views in the same order as `groups_mut`.
    fn groups(&self) -> Vec<&[f64]>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 0.0002, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First and second moment estimates for one parameter group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdamMoments {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

/// Bias-corrected Adam update of one group at step `t` (1-based).
pub fn adam_step(group: &mut ParamGroup<'_>, grads: &[f64], state: &mut AdamMoments, t: u64, cfg: &AdamConfig) {
    assert!(t >= 1, "Adam steps are 1-based");
    assert_eq!(group.values.len(), grads.len(), "gradient shape");
    if state.m.len() != grads.len() {
        state.m = vec![0.0; grads.len()];
        state.v = vec![0.0; grads.len()];
    }
    let bc1 = 1.0 - cfg.beta1.powf(t as f64);
    let bc2 = 1.0 - cfg.beta2.powf(t as f64);
    let row_len = group.row_len.max(1);
    for (i, ((p, &g), (m, v))) in group
        .values
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
        .enumerate()
    {
        if !group.frozen_rows.is_empty() && group.frozen_rows.contains(&(i / row_len)) {
            continue;
        }
        *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
        *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
}

/// Adam over every group of a [`Parameters`] value.
#[derive(Debug, Clone, Default)]
pub struct Adam {
    pub config: AdamConfig,
    pub t: u64,
    moments: Vec<AdamMoments>,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Adam { config, t: 0, moments: Vec::new() }
    }

    pub fn step<P: Parameters>(&mut self, params: &mut P, grads: &P) {
        self.t += 1;
        let grads = grads.groups();
        let mut groups = params.groups_mut();
        self.moments.resize_with(groups.len(), AdamMoments::default);
        for ((group, g), state) in groups.iter_mut().zip(grads).zip(self.moments.iter_mut()) {
            adam_step(group, g, state, self.t, &self.config);
        }
    }
}
