use serde::{Deserialize, Serialize};

/// Metrics of one model on one test split. Positive class = all rubric items
/// correct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub auc: f64,
    pub f1: f64,
    /// Set when the test labels hold a single class; `auc` is then 0.5.
    pub auc_undefined: bool,
}

impl MetricRow {
    pub const NAMES: [&'static str; 5] = ["accuracy", "precision", "recall", "auc", "f1"];

    pub fn values(&self) -> [f64; 5] {
        [self.accuracy, self.precision, self.recall, self.auc, self.f1]
    }
}

/// Area under the ROC curve as the Mann-Whitney statistic, with tied scores
/// sharing their average rank (half credit per tied pair). `None` when one
/// class is absent.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let n_pos = labels.iter().filter(|&&y| y).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ranks are doubled so tie averages stay integral.
    let mut pos_rank2 = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank2 = (i + 1 + j) as u64;
        pos_rank2 += avg_rank2 * order[i..j].iter().filter(|&&k| labels[k]).count() as u64;
        i = j;
    }
    let n_pos = n_pos as u64;
    let u2 = pos_rank2 - n_pos * (n_pos + 1);
    Some(u2 as f64 / 2.0 / (n_pos * n_neg as u64) as f64)
}

/// Thresholded metrics plus AUC. `predicted[i]` is the class decision,
/// `scores[i]` the ranking score.
pub fn binary_metrics_from(predicted: &[bool], scores: &[f64], labels: &[bool]) -> MetricRow {
    assert!(!labels.is_empty(), "metrics need at least one example");
    assert_eq!(predicted.len(), labels.len());
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    let mut correct = 0usize;
    for (&p, &y) in predicted.iter().zip(labels) {
        match (p, y) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
        correct += usize::from(p == y);
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    let auc_value = auc(scores, labels);
    MetricRow {
        accuracy: correct as f64 / labels.len() as f64,
        precision,
        recall,
        auc: auc_value.unwrap_or(0.5),
        f1,
        auc_undefined: auc_value.is_none(),
    }
}

/// Metrics with the class decision `score > threshold`.
pub fn binary_metrics(scores: &[f64], labels: &[bool], threshold: f64) -> MetricRow {
    let predicted: Vec<bool> = scores.iter().map(|&s| s > threshold).collect();
    binary_metrics_from(&predicted, scores, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ranking() {
        let m = binary_metrics(&[0.9, 0.1, 0.8, 0.2], &[true, false, true, false], 0.5);
        assert_eq!(m.auc, 1.0);
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.f1, 1.0);
    }

    #[test]
    fn half_the_pairs() {
        let m = binary_metrics(&[0.9, 0.8, 0.1, 0.2], &[true, false, true, false], 0.5);
        assert_eq!(m.auc, 0.5);
    }

    #[test]
    fn ties_get_half_credit() {
        assert_eq!(auc(&[0.5, 0.5], &[true, false]), Some(0.5));
        // pairs: (0.7,0.3) win, (0.7,0.7) tie, (0.3,0.3) tie, (0.3,0.7) loss
        assert_eq!(auc(&[0.7, 0.3, 0.3, 0.7], &[true, true, false, false]), Some(0.5));
        assert_eq!(auc(&[0.7, 0.3, 0.3, 0.1], &[true, true, false, false]), Some(0.875));
    }

    #[test]
    fn constant_fail_predictor() {
        let labels: Vec<bool> = (0..100).map(|i| i < 38).collect();
        let m = binary_metrics(&vec![0.0; 100], &labels, 0.5);
        assert_eq!((m.precision, m.recall, m.f1, m.auc), (0.0, 0.0, 0.0, 0.5));
        assert!((m.accuracy - 0.62).abs() < 1e-12);
        assert!(!m.auc_undefined);
    }

    #[test]
    fn single_class_flags_auc() {
        let m = binary_metrics(&[0.3, 0.6], &[true, true], 0.5);
        assert!(m.auc_undefined);
        assert_eq!(m.auc, 0.5);
        assert_eq!(m.recall, 0.5);
    }
}
