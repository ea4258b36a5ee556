use serde::{Deserialize, Serialize};

/// Always predicts the most frequent training label; ties go to "fail".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub predicts_positive: bool,
}

impl MajorityBaseline {
    pub fn fit(labels: &[bool]) -> Self {
        let positives = labels.iter().filter(|&&y| y).count();
        MajorityBaseline { predicts_positive: positives > labels.len() - positives }
    }

    pub fn predict(&self) -> bool {
        self.predicts_positive
    }

    /// Constant score; any constant ranks every pair as a tie.
    pub fn score(&self) -> f64 {
        if self.predicts_positive {
            1.0
        } else {
            0.0
        }
    }
}
