use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use miscon::corpus::Corpus;
use miscon::turtlelang::RUBRIC_ITEMS;
use miscon_cli::PipelineConfig;
use proptest::prelude::*;
use serde_json::Value;

const SMALL: &str = "seed = 4
correct = 20
misc_a = 8
misc_b = 8
misc_c = 8
max_epochs = 40
patience = 10
d_emb = 16
d_hidden = 16
n_runs = 2
top_k = 2
";

fn miscon(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miscon")).args(args).current_dir(dir).env("MISCON_LOG", "warn").output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = miscon(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("pipeline.toml"), config).unwrap();
    dir
}

#[test]
fn gen_corpus_is_reproducible() {
    let dir = setup(SMALL);
    ok(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--out", "a"]);
    ok(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--out", "b"]);
    let read = |d: &str| fs::read(dir.path().join(d).join("corpus.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    ok(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--seed", "5", "--out", "c"]);
    assert_ne!(read("a"), read("c"));
    let corpus = Corpus::from_json(&String::from_utf8(read("a")).unwrap()).unwrap();
    assert_eq!(corpus.len(), 44);
}

#[test]
fn missing_corpus_is_a_pipeline_failure() {
    let dir = setup(SMALL);
    let out = miscon(dir.path(), &["train", "--config", "pipeline.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("corpus.json"));
}

#[test]
fn single_class_corpus_is_rejected() {
    let dir = setup(&SMALL.replace("misc_a = 8\nmisc_b = 8\nmisc_c = 8\n", "misc_a = 0\nmisc_b = 0\nmisc_c = 0\n"));
    ok(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--out", "o"]);
    let out = miscon(dir.path(), &["train", "--config", "pipeline.toml", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateLabels"));
}

#[test]
fn bad_configs_are_usage_errors() {
    for text in ["seed = 1\nnot_a_key = 3\n", "max_epochs = 10\npatience = 10\n", "train_fraction = 1.5\n", "seed = \"x\"\n"] {
        let dir = setup(text);
        let out = miscon(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--out", "o"]);
        assert_eq!(out.status.code(), Some(1), "{text}");
    }
    let dir = setup(SMALL);
    assert_eq!(miscon(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(miscon(dir.path(), &["gen-corpus", "--seed", "18446744073709551615"]).status.code(), Some(1));
}

#[test]
fn evaluate_writes_tables_and_reuses_splits() {
    let dir = setup(SMALL);
    ok(dir.path(), &["gen-corpus", "--config", "pipeline.toml", "--out", "o"]);
    ok(dir.path(), &["evaluate", "--config", "pipeline.toml", "--out", "o"]);
    let o = dir.path().join("o");
    let summary = fs::read_to_string(o.join("summary.csv")).unwrap();
    let metrics = fs::read_to_string(o.join("metrics.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4);
    assert_eq!(metrics.lines().count(), 1 + 2 * 4);
    let splits = fs::read(o.join("splits.json")).unwrap();
    ok(dir.path(), &["evaluate", "--config", "pipeline.toml", "--out", "o"]);
    assert_eq!(fs::read(o.join("splits.json")).unwrap(), splits);
    assert_eq!(fs::read_to_string(o.join("summary.csv")).unwrap(), summary);
}

#[test]
fn discover_accounts_for_every_failure_and_plot_is_stable() {
    let dir = setup(SMALL);
    for cmd in ["gen-corpus", "train", "discover", "plot"] {
        ok(dir.path(), &[cmd, "--config", "pipeline.toml", "--out", "o"]);
    }
    let o = dir.path().join("o");
    let corpus = Corpus::from_json(&fs::read_to_string(o.join("corpus.json")).unwrap()).unwrap();
    let file: Value = serde_json::from_str(&fs::read_to_string(o.join("clusters.json")).unwrap()).unwrap();
    let items = file["items"].as_array().unwrap();
    assert_eq!(items.len(), RUBRIC_ITEMS.len());
    for (item, report) in RUBRIC_ITEMS.iter().zip(items) {
        assert_eq!(report["item"], item.code());
        let mut seen: HashMap<String, usize> = HashMap::new();
        let clusters = report["clusters"].as_array().unwrap();
        let ids = clusters.iter().flat_map(|c| c["members"].as_array().unwrap()).chain(report["noise"].as_array().unwrap());
        for id in ids {
            *seen.entry(id.as_str().unwrap().to_string()).or_default() += 1;
        }
        let failing: Vec<&str> =
            corpus.submissions.iter().filter(|s| !s.rubric.passes(*item)).map(|s| s.id.as_str()).collect();
        assert_eq!(seen.len(), failing.len(), "{}", item.code());
        assert!(failing.iter().all(|id| seen.get(*id) == Some(&1)), "{}", item.code());
        assert!(clusters.iter().filter(|c| c["selected"] == true).count() <= 2);
    }

    let svgs: Vec<Vec<u8>> =
        RUBRIC_ITEMS.iter().map(|i| fs::read(o.join(format!("plot_{}.svg", i.code()))).unwrap()).collect();
    ok(dir.path(), &["plot", "--config", "pipeline.toml", "--out", "o"]);
    for (i, before) in RUBRIC_ITEMS.iter().zip(&svgs) {
        assert_eq!(&fs::read(o.join(format!("plot_{}.svg", i.code()))).unwrap(), before);
    }
}

proptest! {
    #[test]
    fn config_survives_toml(seed in 0..=i64::MAX as u64, correct in 0usize..500, lr in 1e-5f64..1.0, stratified in any::<bool>(), eps in proptest::option::of(0.01f64..50.0)) {
        let cfg = PipelineConfig { seed, correct, learning_rate: lr, stratified, epsilon: eps, ..PipelineConfig::default() };
        prop_assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn seeds_beyond_toml_range_are_refused(seed in i64::MAX as u64 + 1..=u64::MAX) {
        let cfg = PipelineConfig { seed, ..PipelineConfig::default() };
        prop_assert!(cfg.validate().is_err());
    }
}
