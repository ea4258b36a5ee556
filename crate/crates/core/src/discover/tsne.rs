//! Exact t-SNE into two dimensions.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::DiscoverError;
use crate::nnet::stream_rng;

const INIT_STREAM: u64 = 30;
const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub exaggeration: f64,
    /// Iterations run with exaggerated affinities and the initial momentum.
    pub exaggeration_iters: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            exaggeration: 12.0,
            exaggeration_iters: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub coords: Vec<[f64; 2]>,
    /// KL(P‖Q) of the final layout.
    pub kl: f64,
    /// KL right after the exaggeration phase ends.
    pub kl_after_exaggeration: f64,
    /// `(iteration, KL)` checkpoints, including the two above.
    pub kl_log: Vec<(usize, f64)>,
    /// Perplexity after clipping to the point count.
    pub perplexity: f64,
    pub seed: u64,
}

fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let s: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            d[i * n + j] = s;
            d[j * n + i] = s;
        }
    }
    d
}

/// Conditional affinities of row `i` at precision `beta`; returns the entropy
/// in nats. Distances are shifted by their minimum, which cancels in the
/// normalization.
fn conditional_row(dist: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    let min = dist.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &d)| d).fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (j, (&d, p)) in dist.iter().zip(out.iter_mut()).enumerate() {
        *p = if j == i { 0.0 } else { (-beta * (d - min)).exp() };
        sum += *p;
    }
    let mut weighted = 0.0;
    for (j, p) in out.iter_mut().enumerate() {
        *p /= sum;
        weighted += *p * (dist[j] - min);
    }
    sum.ln() + beta * weighted
}

/// Symmetric joint affinities `P` with each row's conditional distribution
/// tuned by bisection to the target perplexity.
fn joint_affinities(dist: &[f64], n: usize, perplexity: f64) -> Vec<f64> {
    let target = perplexity.ln();
    let mut cond = vec![0.0; n * n];
    for i in 0..n {
        let row = &dist[i * n..(i + 1) * n];
        let out = &mut cond[i * n..(i + 1) * n];
        let (mut lo, mut hi) = (0.0, f64::INFINITY);
        let mut beta = 1.0;
        for _ in 0..200 {
            let h = conditional_row(row, i, beta, out);
            if (h - target).abs() < 1e-10 {
                break;
            }
            if h > target {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
        conditional_row(row, i, beta, out);
    }
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / (2.0 * n as f64)).max(1e-12);
            }
        }
    }
    p
}

/// Student-t kernel values and their sum over ordered pairs.
fn low_dim_kernel(y: &[[f64; 2]]) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let k = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i * n + j] = k;
            num[j * n + i] = k;
            sum += 2.0 * k;
        }
    }
    (num, sum)
}

fn kl_divergence(p: &[f64], num: &[f64], sum: f64, n: usize) -> f64 {
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pij = p[i * n + j];
                let qij = (num[i * n + j] / sum).max(1e-12);
                kl += pij * (pij / qij).ln();
            }
        }
    }
    kl.max(0.0)
}

/// Projects `points` to 2-D. Deterministic for a fixed seed.
pub fn tsne(points: &[Vec<f64>], cfg: &TsneConfig) -> Result<Projection, DiscoverError> {
    let n = points.len();
    if n < MIN_POINTS {
        return Err(DiscoverError::TooFewPoints { n, min: MIN_POINTS });
    }
    let perplexity = cfg.perplexity.min((n - 1) as f64 / 3.0);
    let p = joint_affinities(&squared_distances(points), n, perplexity);

    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut rng = stream_rng(cfg.seed, INIT_STREAM);
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut kl_log = Vec::new();
    let mut kl_after_exaggeration = f64::NAN;

    for iter in 0..cfg.iterations {
        let exaggerating = iter < cfg.exaggeration_iters;
        let exaggeration = if exaggerating { cfg.exaggeration } else { 1.0 };
        let momentum = if exaggerating { cfg.initial_momentum } else { cfg.final_momentum };
        let (num, sum) = low_dim_kernel(&y);

        for i in 0..n {
            let mut grad = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let k = num[i * n + j];
                let w = (exaggeration * p[i * n + j] - k / sum) * k;
                grad[0] += 4.0 * w * (y[i][0] - y[j][0]);
                grad[1] += 4.0 * w * (y[i][1] - y[j][1]);
            }
            for d in 0..2 {
                let g = &mut gains[i][d];
                *g = if (grad[d] > 0.0) != (velocity[i][d] > 0.0) { *g + 0.2 } else { *g * 0.8 };
                *g = (*g).max(0.01);
                velocity[i][d] = momentum * velocity[i][d] - cfg.learning_rate * *g * grad[d];
            }
        }
        for (yi, vi) in y.iter_mut().zip(&velocity) {
            yi[0] += vi[0];
            yi[1] += vi[1];
        }
        let mean = y.iter().fold([0.0; 2], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        for yi in &mut y {
            yi[0] -= mean[0] / n as f64;
            yi[1] -= mean[1] / n as f64;
        }

        let done = iter + 1;
        let end_of_exaggeration = done == cfg.exaggeration_iters;
        if done % 50 == 0 || end_of_exaggeration || done == cfg.iterations {
            let (num, sum) = low_dim_kernel(&y);
            let kl = kl_divergence(&p, &num, sum, n);
            log::debug!("t-SNE iteration {done}: KL {kl:.6}");
            kl_log.push((done, kl));
            if end_of_exaggeration {
                kl_after_exaggeration = kl;
            }
        }
    }
    if y.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
        return Err(DiscoverError::NonFinite("t-SNE layout".into()));
    }
    let (num, sum) = low_dim_kernel(&y);
    let kl = kl_divergence(&p, &num, sum, n);
    if kl_after_exaggeration.is_nan() {
        kl_after_exaggeration = kl;
    }
    Ok(Projection { coords: y, kl, kl_after_exaggeration, kl_log, perplexity, seed: cfg.seed })
}
