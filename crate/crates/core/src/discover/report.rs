use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ClusterFile;
use crate::corpus::Corpus;

/// One line of `projection.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub id: String,
    pub x: f64,
    pub y: f64,
    /// Bit r set when rubric item Rr failed.
    pub failed_items: u8,
}

pub(crate) fn projection_csv(rows: &[ProjectionRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

pub fn parse_projection_csv(text: &str) -> Result<Vec<ProjectionRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

fn indent(text: &str, by: &str) -> String {
    text.lines().map(|l| format!("{by}{l}\n")).collect()
}

/// Plain-text report of the selected clusters with member programs
/// pretty-printed for inspection.
pub fn render_report(file: &ClusterFile, corpus: &Corpus) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "t-SNE: perplexity {}, seed {}, KL {:.4} (after exaggeration {:.4})\n",
        file.tsne.perplexity, file.tsne.seed, file.tsne.kl, file.tsne.kl_after_exaggeration
    );
    for item in &file.items {
        let _ = writeln!(out, "== {} {} ==", item.item, item.title);
        let _ = write!(out, "{} failing", item.failing);
        if let Some(eps) = item.epsilon {
            let _ = write!(out, ", epsilon {eps:.4}");
        }
        let _ = writeln!(out, ", {} clusters, {} noise", item.clusters.len(), item.noise.len());
        if let Some(note) = &item.note {
            let _ = writeln!(out, "{note}");
        }
        if item.zero_normalizer {
            let _ = writeln!(out, "warning: a normalizer is zero, affected metrics are reported as 0");
        }
        for c in item.selected() {
            let _ = write!(
                out,
                "\n-- cluster rank {} ({} members) ED {:.4} TED {:.4} ED(2-D) {:.4}",
                c.density_rank,
                c.members.len(),
                c.ed,
                c.ted,
                c.ed_projection
            );
            if let Some(dup) = &c.duplicate_of {
                let _ = write!(out, " [duplicate of {dup}]");
            }
            let _ = writeln!(out, "\nmembers: {}", c.members.join(", "));
            for id in &c.members {
                let _ = writeln!(out, "\n  [{id}]");
                if let Some(sub) = corpus.get(id) {
                    out.push_str(&indent(&sub.ast.to_source(), "    "));
                }
            }
        }
        if !item.noise.is_empty() {
            let _ = writeln!(out, "\nnoise: {}", item.noise.join(", "));
        }
        out.push('\n');
    }
    out.push_str("ED: mean pairwise embedding distance over mean distance to the embedding centroid of the item's failures.\n");
    out.push_str("TED: mean pairwise tree edit distance over mean distance to the medoid tree of the item's failures.\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            ProjectionRow { id: "s0001".into(), x: 1.5, y: -0.25, failed_items: 0b101 },
            ProjectionRow { id: "odd,id".into(), x: 1e-300, y: 3.0, failed_items: 1 },
        ];
        let text = projection_csv(&rows);
        assert!(text.starts_with("id,x,y,failed_items\ns0001,1.5,-0.25,5\n"));
        assert_eq!(parse_projection_csv(&text).unwrap(), rows);
    }
}
