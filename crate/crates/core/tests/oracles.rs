mod common;

use miscon::discover::dbscan;
use miscon::eval::{auc, binary_metrics};
use miscon::pathctx::{extract_paths, Direction};
use miscon::turtlelang::{tree_edit_distance, PreparedTree};
use miscon::{Ast, AstNode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: [&str; 3] = ["a", "b", "c"];

#[test]
fn ted_equals_exhaustive_search_up_to_four_nodes() {
    let graph = common::EditGraph::build(4, 3);
    let trees = graph.trees();
    let asts: Vec<AstNode> = trees.iter().map(|&i| graph.as_ast(i)).collect();
    let prepared: Vec<PreparedTree> = asts.iter().map(PreparedTree::new).collect();
    for (a, &src) in trees.iter().enumerate() {
        let dist = graph.bfs(src);
        for (b, &dst) in trees.iter().enumerate() {
            assert_eq!(prepared[a].distance(&prepared[b]), dist[dst] as usize, "{:?} vs {:?}", asts[a], asts[b]);
        }
    }
}

fn tree(seed: u64, max_nodes: usize) -> Ast {
    Ast::new(common::random_tree(&mut ChaCha8Rng::seed_from_u64(seed), max_nodes, &LABELS))
}

proptest! {
    #[test]
    fn ted_is_a_metric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (tree(s1, 15), tree(s2, 15), tree(s3, 15));
        let ab = tree_edit_distance(&a, &b);
        prop_assert_eq!(ab, tree_edit_distance(&b, &a));
        prop_assert_eq!(tree_edit_distance(&a, &a), 0);
        prop_assert!(tree_edit_distance(&a, &c) <= ab + tree_edit_distance(&b, &c));
        prop_assert!(ab <= a.size().max(b.size()) + a.size().min(b.size()));
        prop_assert!(ab >= a.size().abs_diff(b.size()));
    }
}

/// Leaf-to-leaf paths rebuilt from parent pointers.
fn brute_force_paths(root: &AstNode, max_length: usize, max_width: usize) -> Vec<(String, String, String)> {
    let mut labels = Vec::new();
    let mut parent = Vec::new();
    let mut leaves = Vec::new();
    fn walk(n: &AstNode, up: Option<usize>, labels: &mut Vec<String>, parent: &mut Vec<Option<usize>>, leaves: &mut Vec<usize>) {
        let id = labels.len();
        labels.push(n.label.clone());
        parent.push(up);
        if n.children.is_empty() {
            leaves.push(id);
        }
        for c in &n.children {
            walk(c, Some(id), labels, parent, leaves);
        }
    }
    walk(root, None, &mut labels, &mut parent, &mut leaves);
    let ancestors = |mut x: usize| {
        let mut out = Vec::new();
        while let Some(p) = parent[x] {
            out.push(p);
            x = p;
        }
        out
    };
    let mut out = Vec::new();
    for i in 0..leaves.len() {
        for j in i + 1..leaves.len().min(i + max_width + 1) {
            let (ua, ub) = (ancestors(leaves[i]), ancestors(leaves[j]));
            let lca_pos = ua.iter().position(|x| ub.contains(x)).unwrap();
            let lca = ua[lca_pos];
            let down: Vec<usize> = ub.iter().take_while(|&&x| x != lca).copied().collect();
            if lca_pos + 1 + down.len() > max_length {
                continue;
            }
            let mut key: Vec<String> = ua[..=lca_pos].iter().map(|&x| format!("{}↑", labels[x])).collect();
            key.extend(down.iter().rev().map(|&x| format!("{}↓", labels[x])));
            out.push((labels[leaves[i]].clone(), key.join(" "), labels[leaves[j]].clone()));
        }
    }
    out
}

proptest! {
    #[test]
    fn paths_match_parent_pointer_reconstruction(seed in any::<u64>(), len in 1usize..10, width in 1usize..4) {
        let ast = tree(seed, 20);
        let got: Vec<(String, String, String)> = extract_paths(&ast, len, width)
            .into_iter()
            .map(|c| {
                prop_assert!(c.path.iter().take_while(|(_, d)| *d == Direction::Up).count() >= 1);
                Ok((c.start.clone(), c.path_key(), c.end.clone()))
            })
            .collect::<Result<_, _>>()?;
        prop_assert_eq!(got, brute_force_paths(&ast.root, len, width));
    }
}

fn random_points(rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let n = rng.random_range(1..=60);
    let centers: Vec<[f64; 2]> = (0..rng.random_range(1..4)).map(|_| [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]).collect();
    (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                [rng.random_range(-5.0..15.0), rng.random_range(-5.0..15.0)]
            } else {
                let c = centers[rng.random_range(0..centers.len())];
                // Grid-snapped offsets produce exact-ε ties now and then.
                let snap = |v: f64| (v * 4.0).round() / 4.0;
                [snap(c[0] + rng.random_range(-1.0..1.0)), snap(c[1] + rng.random_range(-1.0..1.0))]
            }
        })
        .collect()
}

#[test]
fn dbscan_matches_component_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let pts = random_points(&mut rng);
        let eps = [0.25, 0.5, 0.75, 1.0][rng.random_range(0..4)];
        let minpts = rng.random_range(1..6);
        let got = dbscan(&pts, eps, minpts);
        let want = common::dbscan_reference(&pts, eps, minpts);
        assert_eq!(common::canonical(&got), common::canonical(&want));
    }
}

proptest! {
    #[test]
    fn dbscan_core_partition_ignores_order(seed in any::<u64>(), shift in 0usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_points(&mut rng);
        let n = pts.len();
        let k = shift % n;
        let rotated: Vec<[f64; 2]> = pts[k..].iter().chain(&pts[..k]).copied().collect();
        let (a, b) = (dbscan(&pts, 0.75, 3), dbscan(&rotated, 0.75, 3));
        // Noise is order-free; so is the grouping of core points.
        let core = |p: &[[f64; 2]], i: usize| p.iter().filter(|q| miscon::discover::distance(&p[i], q) <= 0.75).count() >= 3;
        for i in 0..n {
            let j = (i + n - k) % n;
            prop_assert_eq!(a[i].is_none(), b[j].is_none());
            for i2 in 0..n {
                let j2 = (i2 + n - k) % n;
                if core(&pts, i) && core(&pts, i2) {
                    prop_assert_eq!(a[i] == a[i2], b[j] == b[j2]);
                }
            }
        }
    }
}

fn random_scores(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    let n = rng.random_range(2..=50);
    let levels = rng.random_range(2..12);
    let scores = (0..n).map(|_| rng.random_range(0..levels) as f64 / levels as f64).collect();
    let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
    labels[0] = true;
    labels[1] = false;
    (scores, labels)
}

#[test]
fn auc_equals_pair_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (scores, labels) = random_scores(&mut rng);
        assert_eq!(auc(&scores, &labels), common::auc_pairs(&scores, &labels));
    }
    assert_eq!(auc(&[0.3, 0.4], &[true, true]), None);
}

proptest! {
    #[test]
    fn auc_ignores_monotone_transforms(seed in any::<u64>()) {
        let (scores, labels) = random_scores(&mut ChaCha8Rng::seed_from_u64(seed));
        let squashed: Vec<f64> = scores.iter().map(|s| (3.0 * s - 1.0).exp()).collect();
        prop_assert_eq!(auc(&scores, &labels), auc(&squashed, &labels));
        let flipped: Vec<bool> = labels.iter().map(|y| !y).collect();
        let a = auc(&scores, &labels).unwrap();
        prop_assert!((a + auc(&scores, &flipped).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_example_order(seed in any::<u64>(), k in 0usize..50) {
        let (scores, labels) = random_scores(&mut ChaCha8Rng::seed_from_u64(seed));
        let n = scores.len();
        let r = k % n;
        let s2: Vec<f64> = scores[r..].iter().chain(&scores[..r]).copied().collect();
        let l2: Vec<bool> = labels[r..].iter().chain(&labels[..r]).copied().collect();
        prop_assert_eq!(binary_metrics(&scores, &labels, 0.5), binary_metrics(&s2, &l2, 0.5));
    }
}

#[test]
fn constant_fail_predictor_row() {
    let mut labels = vec![false; 62];
    labels.extend([true; 38]);
    let m = binary_metrics(&vec![0.0; 100], &labels, 0.5);
    assert_eq!((m.accuracy, m.precision, m.recall, m.auc, m.f1), (0.62, 0.0, 0.0, 0.5, 0.0));
}
