//! Normalized within-cluster dispersion in embedding space and tree space.

use serde::{Deserialize, Serialize};

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean over unordered pairs of `dist(i, j)`; 0 for fewer than two members.
pub fn mean_pairwise(members: &[usize], dist: impl Fn(usize, usize) -> f64) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (k, &i) in members.iter().enumerate() {
        for &j in &members[k + 1..] {
            total += dist(i, j);
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Mean Euclidean distance of the rows in `population` to their centroid.
pub fn mean_distance_to_centroid(vectors: &[Vec<f64>], population: &[usize]) -> f64 {
    let dim = vectors[population[0]].len();
    let mut centroid = vec![0.0; dim];
    for &i in population {
        for (c, x) in centroid.iter_mut().zip(&vectors[i]) {
            *c += x;
        }
    }
    centroid.iter_mut().for_each(|c| *c /= population.len() as f64);
    population.iter().map(|&i| euclid(&vectors[i], &centroid)).sum::<f64>() / population.len() as f64
}

/// Pairwise tree edit distances over a fixed set of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct TedMatrix {
    n: usize,
    d: Vec<usize>,
}

impl TedMatrix {
    pub fn compute(asts: &[&crate::Ast]) -> Self {
        use crate::turtlelang::PreparedTree;
        use rayon::prelude::*;
        let prepared: Vec<PreparedTree<'_>> = asts.iter().map(|a| PreparedTree::new(&a.root)).collect();
        let n = asts.len();
        let rows: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if j > i { prepared[i].distance(&prepared[j]) } else { 0 }).collect())
            .collect();
        let mut d = vec![0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                d[i * n + j] = rows[i][j];
                d[j * n + i] = rows[i][j];
            }
        }
        TedMatrix { n, d }
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.d[i * self.n + j]
    }

    /// Member of `population` with the smallest total distance to the rest;
    /// the lowest index wins ties.
    pub fn medoid(&self, population: &[usize]) -> usize {
        let total = |i: usize| population.iter().map(|&j| self.get(i, j)).sum::<usize>();
        *population.iter().min_by_key(|&&i| (total(i), i)).expect("non-empty population")
    }

    /// Mean distance of `population` to its medoid.
    pub fn mean_distance_to_medoid(&self, population: &[usize]) -> f64 {
        let m = self.medoid(population);
        population.iter().map(|&i| self.get(i, m)).sum::<usize>() as f64 / population.len() as f64
    }
}

/// Dispersion of a whole population, used to normalize cluster metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub embedding: f64,
    pub tree: f64,
    pub projection: f64,
}

impl Normalizers {
    pub fn compute(embeddings: &[Vec<f64>], teds: &TedMatrix, coords: &[Vec<f64>], population: &[usize]) -> Self {
        Normalizers {
            embedding: mean_distance_to_centroid(embeddings, population),
            tree: teds.mean_distance_to_medoid(population),
            projection: mean_distance_to_centroid(coords, population),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterMetrics {
    /// Normalized embedding distance.
    pub ed: f64,
    /// Normalized tree edit distance.
    pub ted: f64,
    /// Normalized distance in the 2-D projection.
    pub ed_projection: f64,
    /// Mean pairwise distance in the 2-D projection (unnormalized).
    pub mean_intra_2d: f64,
    /// A normalizer was zero; the affected metrics are reported as 0.
    pub zero_normalizer: bool,
}

/// Metrics of one cluster. Indices refer to the rows of `embeddings`,
/// `coords` and `teds`.
pub fn cluster_metrics(
    members: &[usize],
    embeddings: &[Vec<f64>],
    coords: &[Vec<f64>],
    teds: &TedMatrix,
    norm: &Normalizers,
) -> ClusterMetrics {
    let ratio = |x: f64, by: f64| if by == 0.0 { 0.0 } else { x / by };
    let ed_raw = mean_pairwise(members, |i, j| euclid(&embeddings[i], &embeddings[j]));
    let ted_raw = mean_pairwise(members, |i, j| teds.get(i, j) as f64);
    let intra_2d = mean_pairwise(members, |i, j| euclid(&coords[i], &coords[j]));
    ClusterMetrics {
        ed: ratio(ed_raw, norm.embedding),
        ted: ratio(ted_raw, norm.tree),
        ed_projection: ratio(intra_2d, norm.projection),
        mean_intra_2d: intra_2d,
        zero_normalizer: norm.embedding == 0.0 || norm.tree == 0.0 || norm.projection == 0.0,
    }
}
