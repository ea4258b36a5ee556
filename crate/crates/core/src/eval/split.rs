use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::nnet::stream_rng;

pub const MIN_CORPUS: usize = 10;
const SPLIT_STREAM: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub n_runs: usize,
    pub base_seed: u64,
    /// Split each class separately so both keep their share.
    #[serde(default)]
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train_fraction: 0.8, n_runs: 50, base_seed: 0, stratified: false }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(EvalError::InvalidSpec("train_fraction must be in (0, 1)".into()));
        }
        if self.n_runs == 0 {
            return Err(EvalError::InvalidSpec("n_runs must be positive".into()));
        }
        Ok(())
    }

    /// Seed used for run `run`'s split and model initialization.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

/// Indices into the corpus; both lists ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub run: usize,
    pub seed: u64,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn take_train(mut idx: Vec<usize>, fraction: f64, rng: &mut impl rand::Rng) -> (Vec<usize>, Vec<usize>) {
    idx.shuffle(rng);
    let n_train = (idx.len() as f64 * fraction).floor() as usize;
    let test = idx.split_off(n_train);
    (idx, test)
}

/// Draws the train/test split of one run: `floor(n · train_fraction)` train
/// examples, the rest test.
pub fn resample_split(labels: &[bool], spec: &SplitSpec, run: usize) -> Result<Split, EvalError> {
    spec.validate()?;
    if labels.len() < MIN_CORPUS {
        return Err(EvalError::CorpusTooSmall { n: labels.len(), min: MIN_CORPUS });
    }
    let seed = spec.run_seed(run);
    let mut rng = stream_rng(seed, SPLIT_STREAM);
    let (mut train, mut test) = if spec.stratified {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [false, true] {
            let idx = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            let (a, b) = take_train(idx, spec.train_fraction, &mut rng);
            train.extend(a);
            test.extend(b);
        }
        (train, test)
    } else {
        take_train((0..labels.len()).collect(), spec.train_fraction, &mut rng)
    };
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { run, seed, train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<bool> {
        (0..n).map(|i| i % 3 == 0).collect()
    }

    #[test]
    fn sizes_floor_train() {
        let s = resample_split(&labels(207), &SplitSpec::default(), 0).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (165, 42));
    }

    #[test]
    fn disjoint_exhaustive_and_repeatable() {
        let spec = SplitSpec { base_seed: 9, ..SplitSpec::default() };
        let a = resample_split(&labels(50), &spec, 3).unwrap();
        assert_eq!(a, resample_split(&labels(50), &spec, 3).unwrap());
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
        assert_ne!(a.train, resample_split(&labels(50), &spec, 4).unwrap().train);
    }

    #[test]
    fn stratified_keeps_class_shares() {
        let y = labels(60);
        let spec = SplitSpec { stratified: true, ..SplitSpec::default() };
        let s = resample_split(&y, &spec, 0).unwrap();
        assert_eq!(s.train.iter().filter(|&&i| y[i]).count(), 16);
        assert_eq!(s.train.len(), 48);
    }

    #[test]
    fn too_small() {
        assert_eq!(
            resample_split(&labels(9), &SplitSpec::default(), 0),
            Err(EvalError::CorpusTooSmall { n: 9, min: 10 })
        );
    }
}
