//! DBSCAN on 2-D points and knee-based ε selection.

use serde::{Deserialize, Serialize};

use super::DiscoverError;

/// Smallest ε handed out, so that coincident points still cluster.
pub const MIN_EPSILON: f64 = 1e-12;

pub fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    /// Position of the knee on the ascending k-dist curve.
    pub knee_index: usize,
    /// All k-dists were equal, so there was no knee.
    pub degenerate: bool,
}

/// Distance from each point to its `k`-th nearest other point.
pub fn k_distances(points: &[[f64; 2]], k: usize) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d: Vec<f64> =
                points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| distance(p, q)).collect();
            d.sort_by(f64::total_cmp);
            d[k - 1]
        })
        .collect()
}

/// Picks ε at the knee of the sorted `minpts`-distance curve: the point
/// farthest from the chord between the curve's endpoints, with both axes
/// rescaled to [0, 1].
pub fn select_epsilon(points: &[[f64; 2]], minpts: usize) -> Result<EpsilonChoice, DiscoverError> {
    if minpts < 1 || points.len() <= minpts {
        return Err(DiscoverError::TooFewPoints { n: points.len(), min: minpts + 1 });
    }
    let mut kd = k_distances(points, minpts);
    kd.sort_by(f64::total_cmp);
    let (first, last) = (kd[0], kd[kd.len() - 1]);
    if last == first {
        return Ok(EpsilonChoice { epsilon: first.max(MIN_EPSILON), knee_index: 0, degenerate: true });
    }
    let span = (kd.len() - 1) as f64;
    let mut knee = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &d) in kd.iter().enumerate() {
        // The chord is y = x in normalized coordinates.
        let gap = (i as f64 / span - (d - first) / (last - first)).abs();
        if gap > best {
            best = gap;
            knee = i;
        }
    }
    Ok(EpsilonChoice { epsilon: kd[knee].max(MIN_EPSILON), knee_index: knee, degenerate: false })
}

/// Cluster label per point; `None` is noise. Clusters are numbered in the
/// order of their lowest-index core point, and a border point joins the first
/// cluster that reaches it.
pub fn dbscan(points: &[[f64; 2]], epsilon: f64, minpts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| distance(&points[i], &points[j]) <= epsilon).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= minpts).collect();
    let mut labels = vec![None; n];
    let mut next = 0;
    for seed in 0..n {
        if labels[seed].is_some() || !core[seed] {
            continue;
        }
        labels[seed] = Some(next);
        let mut stack = vec![seed];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if labels[q].is_none() {
                    labels[q] = Some(next);
                    if core[q] {
                        stack.push(q);
                    }
                }
            }
        }
        next += 1;
    }
    labels
}
