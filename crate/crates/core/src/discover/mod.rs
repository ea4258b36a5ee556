//! Embedding extraction, t-SNE projection and per-rubric-item DBSCAN
//! clustering of failing submissions.

mod dbscan;
mod embed;
mod metrics;
mod report;
mod tsne;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dbscan::{dbscan, distance, k_distances, select_epsilon, EpsilonChoice, MIN_EPSILON};
pub use embed::{extract_embeddings, EmbeddingKind};
pub use metrics::{cluster_metrics, mean_distance_to_centroid, mean_pairwise, ClusterMetrics, Normalizers, TedMatrix};
pub use report::{parse_projection_csv, render_report, ProjectionRow};
pub use tsne::{tsne, Projection, TsneConfig};

use crate::corpus::Corpus;
use crate::nnet::{Code2VecParams, NnetError};
use crate::pathctx::EncodedSubmission;
use crate::turtlelang::{RubricItem, RubricScore, RUBRIC_ITEMS};
use crate::Ast;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscoverError {
    #[error("{n} points given; at least {min} are needed")]
    TooFewPoints { n: usize, min: usize },
    #[error("non-finite values in {0}")]
    NonFinite(String),
    #[error("invalid cluster config: {0}")]
    InvalidConfig(String),
    #[error("{0} encodings given for {1} submissions")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Model(#[from] NnetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub minpts: usize,
    /// Fixed ε in projection units; `None` selects it from the k-dist knee.
    pub epsilon: Option<f64>,
    /// Cluster each rubric item's failures separately, or all failures once.
    pub per_rubric: bool,
    /// Number of densest clusters marked for inspection.
    pub top_k: usize,
    /// Jaccard overlap above which a cluster is annotated as a duplicate.
    pub duplicate_jaccard: f64,
    pub embedding: EmbeddingKind,
    pub tsne: TsneConfig,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            minpts: 3,
            epsilon: None,
            per_rubric: true,
            top_k: 4,
            duplicate_jaccard: 0.8,
            embedding: EmbeddingKind::Flattened,
            tsne: TsneConfig::default(),
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<(), DiscoverError> {
        let bad = |m: &str| Err(DiscoverError::InvalidConfig(m.into()));
        if self.minpts < 2 {
            return bad("minpts must be at least 2");
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
            return bad("a fixed epsilon must be positive");
        }
        if !(self.tsne.perplexity > 0.0 && self.tsne.learning_rate > 0.0 && self.tsne.iterations > 0) {
            return bad("t-SNE perplexity, learning rate and iterations must be positive");
        }
        if !(0.0..=1.0).contains(&self.duplicate_jaccard) {
            return bad("duplicate_jaccard must be in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: Vec<String>,
    pub ed: f64,
    pub ted: f64,
    /// ED measured in the 2-D projection instead of the embedding space.
    pub ed_projection: f64,
    pub mean_intra_2d: f64,
    /// 1 = smallest mean intra-cluster 2-D distance.
    pub density_rank: usize,
    pub selected: bool,
    /// `"<item>#<rank>"` of an earlier cluster with high member overlap.
    pub duplicate_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    /// Rubric item code (`R0`..`R5`), or `ALL` when clustering every failure.
    pub item: String,
    pub title: String,
    pub failing: usize,
    pub epsilon: Option<f64>,
    pub knee_index: Option<usize>,
    pub degenerate_curve: bool,
    pub normalizers: Option<Normalizers>,
    pub zero_normalizer: bool,
    /// Ordered by density rank.
    pub clusters: Vec<Cluster>,
    pub noise: Vec<String>,
    pub note: Option<String>,
}

impl ClusterReport {
    pub fn selected(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| c.selected)
    }
}

/// Everything discovery needs about the failing submissions, index-aligned.
pub struct FailingSet<'a> {
    pub ids: Vec<String>,
    pub asts: Vec<&'a Ast>,
    pub rubric: Vec<RubricScore>,
    pub embeddings: Vec<Vec<f64>>,
    pub coords: Vec<Vec<f64>>,
    pub teds: TedMatrix,
}

impl<'a> FailingSet<'a> {
    pub fn new(
        ids: Vec<String>,
        asts: Vec<&'a Ast>,
        rubric: Vec<RubricScore>,
        embeddings: Vec<Vec<f64>>,
        coords: Vec<[f64; 2]>,
    ) -> Self {
        let teds = TedMatrix::compute(&asts);
        let coords = coords.into_iter().map(|c| c.to_vec()).collect();
        FailingSet { ids, asts, rubric, embeddings, coords, teds }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Clusters the members of `set` failing `item` (every member when `item`
/// is `None`).
pub fn discover_per_rubric(set: &FailingSet<'_>, item: Option<RubricItem>, cfg: &ClusterConfig) -> ClusterReport {
    let population: Vec<usize> =
        (0..set.len()).filter(|&i| item.map_or(true, |it| !set.rubric[i].passes(it))).collect();
    let ids = |ix: &[usize]| -> Vec<String> { ix.iter().map(|&i| set.ids[i].clone()).collect() };
    let mut report = ClusterReport {
        item: item.map_or_else(|| "ALL".to_string(), RubricItem::code),
        title: item.map_or("All failing submissions", RubricItem::title).to_string(),
        failing: population.len(),
        epsilon: None,
        knee_index: None,
        degenerate_curve: false,
        normalizers: None,
        zero_normalizer: false,
        clusters: Vec::new(),
        noise: Vec::new(),
        note: None,
    };
    if population.is_empty() {
        report.note = Some("no clusters: no submission fails this item".into());
        return report;
    }
    let needed = if cfg.epsilon.is_some() { cfg.minpts } else { cfg.minpts + 1 };
    if population.len() < needed {
        report.noise = ids(&population);
        report.note = Some(format!(
            "no clusters: too few failures ({} failing, {needed} needed with minpts {})",
            population.len(),
            cfg.minpts
        ));
        return report;
    }

    let points: Vec<[f64; 2]> = population.iter().map(|&i| [set.coords[i][0], set.coords[i][1]]).collect();
    let epsilon = match cfg.epsilon {
        Some(e) => e,
        None => {
            let choice = select_epsilon(&points, cfg.minpts).expect("population exceeds minpts");
            report.knee_index = Some(choice.knee_index);
            report.degenerate_curve = choice.degenerate;
            choice.epsilon
        }
    };
    report.epsilon = Some(epsilon);
    let labels = dbscan(&points, epsilon, cfg.minpts);
    let n_clusters = labels.iter().flatten().max().map_or(0, |&m| m + 1);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    let mut noise = Vec::new();
    for (&p, label) in population.iter().zip(&labels) {
        match label {
            Some(c) => groups[*c].push(p),
            None => noise.push(p),
        }
    }
    let norm = Normalizers::compute(&set.embeddings, &set.teds, &set.coords, &population);
    report.normalizers = Some(norm);
    report.zero_normalizer = norm.embedding == 0.0 || norm.tree == 0.0 || norm.projection == 0.0;

    let mut scored: Vec<(ClusterMetrics, Vec<usize>)> = groups
        .into_iter()
        .map(|g| (cluster_metrics(&g, &set.embeddings, &set.coords, &set.teds, &norm), g))
        .collect();
    // Stable sort keeps discovery order among equally dense clusters.
    scored.sort_by(|a, b| a.0.mean_intra_2d.total_cmp(&b.0.mean_intra_2d));
    report.clusters = scored
        .into_iter()
        .enumerate()
        .map(|(rank, (m, g))| Cluster {
            members: ids(&g),
            ed: m.ed,
            ted: m.ted,
            ed_projection: m.ed_projection,
            mean_intra_2d: m.mean_intra_2d,
            density_rank: rank + 1,
            selected: rank < cfg.top_k,
            duplicate_of: None,
        })
        .collect();
    report.noise = ids(&noise);
    if report.clusters.is_empty() {
        report.note = Some("no clusters: every failing submission is noise".into());
    }
    report
}

pub fn jaccard(a: &[String], b: &[String]) -> f64 {
    let a: BTreeSet<&String> = a.iter().collect();
    let b: BTreeSet<&String> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Annotates each cluster that overlaps an earlier item's cluster by more
/// than `threshold` Jaccard. Nothing is removed.
pub fn annotate_duplicates(reports: &mut [ClusterReport], threshold: f64) {
    for r in 1..reports.len() {
        let (earlier, rest) = reports.split_at_mut(r);
        for cluster in &mut rest[0].clusters {
            cluster.duplicate_of = earlier.iter().find_map(|prev| {
                prev.clusters
                    .iter()
                    .find(|c| jaccard(&c.members, &cluster.members) > threshold)
                    .map(|c| format!("{}#{}", prev.item, c.density_rank))
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsneSummary {
    pub kl: f64,
    pub kl_after_exaggeration: f64,
    pub perplexity: f64,
    pub seed: u64,
}

/// Contents of `clusters.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterFile {
    pub tsne: TsneSummary,
    pub items: Vec<ClusterReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub rows: Vec<ProjectionRow>,
    pub projection: Projection,
    pub file: ClusterFile,
}

impl Discovery {
    pub fn clusters_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.file).expect("cluster file serializes");
        s.push('\n');
        s
    }

    /// `id,x,y,failed_items` with the failed items as a bitmask (bit r = item Rr).
    pub fn projection_csv(&self) -> String {
        report::projection_csv(&self.rows)
    }
}

/// Runs the full discovery pipeline over the submissions failing overall.
/// `encoded[i]` must encode `corpus.submissions[i]`.
pub fn discover(
    corpus: &Corpus,
    model: &Code2VecParams,
    encoded: &[EncodedSubmission],
    cfg: &ClusterConfig,
) -> Result<Discovery, DiscoverError> {
    cfg.validate()?;
    if encoded.len() != corpus.len() {
        return Err(DiscoverError::LengthMismatch(encoded.len(), corpus.len()));
    }
    let failing: Vec<usize> = (0..corpus.len()).filter(|&i| !corpus.submissions[i].overall()).collect();
    let fail_enc: Vec<EncodedSubmission> = failing.iter().map(|&i| encoded[i].clone()).collect();
    let embeddings = extract_embeddings(model, &fail_enc, cfg.embedding)?;
    if embeddings.iter().flatten().any(|x| !x.is_finite()) {
        return Err(DiscoverError::NonFinite("embeddings".into()));
    }
    let projection = tsne(&embeddings, &cfg.tsne)?;
    log::info!(
        "projected {} failing submissions, KL {:.4} (after exaggeration {:.4})",
        failing.len(),
        projection.kl,
        projection.kl_after_exaggeration
    );
    let subs: Vec<_> = failing.iter().map(|&i| &corpus.submissions[i]).collect();
    let set = FailingSet::new(
        subs.iter().map(|s| s.id.clone()).collect(),
        subs.iter().map(|s| &s.ast).collect(),
        subs.iter().map(|s| s.rubric).collect(),
        embeddings,
        projection.coords.clone(),
    );
    let items: Vec<Option<RubricItem>> =
        if cfg.per_rubric { RUBRIC_ITEMS.iter().copied().map(Some).collect() } else { vec![None] };
    let mut reports: Vec<ClusterReport> = items.par_iter().map(|&it| discover_per_rubric(&set, it, cfg)).collect();
    annotate_duplicates(&mut reports, cfg.duplicate_jaccard);

    let rows = subs
        .iter()
        .zip(&projection.coords)
        .map(|(s, c)| ProjectionRow { id: s.id.clone(), x: c[0], y: c[1], failed_items: s.rubric.failed_mask() })
        .collect();
    let file = ClusterFile {
        tsne: TsneSummary {
            kl: projection.kl,
            kl_after_exaggeration: projection.kl_after_exaggeration,
            perplexity: projection.perplexity,
            seed: projection.seed,
        },
        items: reports,
    };
    Ok(Discovery { rows, projection, file })
}
