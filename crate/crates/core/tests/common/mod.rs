//! Independent reference implementations used as test oracles. Also pulled
//! into the CLI acceptance suite by path.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use miscon::nnet::Parameters;
use miscon::AstNode;
use rand::Rng;

// ---------------------------------------------------------------------------
// Finite differences

/// Largest per-entry relative error between `analytic` and central
/// differences of `loss`, for each parameter group. Entries where both
/// gradients are below `floor` in magnitude are compared against `floor`.
pub fn gradient_check<P, F>(params: &P, analytic: &P, loss: F, h: f64, floor: f64) -> Vec<f64>
where
    P: Parameters + Clone,
    F: Fn(&P) -> f64,
{
    let n_groups = params.groups().len();
    let mut worst = vec![0.0f64; n_groups];
    for (g, worst_g) in worst.iter_mut().enumerate() {
        let len = params.groups()[g].len();
        for k in 0..len {
            let bumped = |delta: f64| {
                let mut p = params.clone();
                p.groups_mut()[g].values[k] += delta;
                loss(&p)
            };
            let numeric = (bumped(h) - bumped(-h)) / (2.0 * h);
            let a = analytic.groups()[g][k];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
            *worst_g = worst_g.max(rel);
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Tree edit distance by exhaustive search

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    label: u8,
    children: Vec<Node>,
}

type Forest = Vec<Node>;

fn forest_size(f: &[Node]) -> usize {
    f.iter().map(|n| 1 + forest_size(&n.children)).sum()
}

fn encode(f: &[Node], out: &mut Vec<u8>) {
    for n in f {
        out.push(n.label);
        encode(&n.children, out);
        out.push(u8::MAX);
    }
}

fn key(f: &[Node]) -> Vec<u8> {
    let mut k = Vec::new();
    encode(f, &mut k);
    k
}

/// All ordered forests with exactly `n` nodes over `labels` letters.
fn forests(n: usize, labels: u8, memo: &mut HashMap<usize, Vec<Forest>>) -> Vec<Forest> {
    if let Some(f) = memo.get(&n) {
        return f.clone();
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        // First tree has `k` nodes, the rest of the forest `n - k`.
        for k in 1..=n {
            let inner = forests(k - 1, labels, memo);
            let rest = forests(n - k, labels, memo);
            for label in 0..labels {
                for kids in &inner {
                    for tail in &rest {
                        let mut f = vec![Node { label, children: kids.clone() }];
                        f.extend(tail.iter().cloned());
                        out.push(f);
                    }
                }
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

/// Deletes the node at pre-order position `target`; its children take its
/// place among its siblings.
fn delete_at(f: &[Node], target: &mut isize) -> Forest {
    let mut out = Vec::new();
    for n in f {
        if *target == 0 {
            *target = -1;
            out.extend(n.children.iter().cloned());
            continue;
        }
        *target -= 1;
        let children = if *target >= 0 { delete_at(&n.children, target) } else { n.children.clone() };
        out.push(Node { label: n.label, children });
    }
    out
}

fn relabel_at(f: &[Node], target: &mut isize, label: u8) -> Forest {
    let mut out = Vec::new();
    for n in f {
        let mut node = n.clone();
        if *target == 0 {
            node.label = label;
            *target = -1;
        } else if *target > 0 {
            *target -= 1;
            node.children = relabel_at(&n.children, target, label);
        }
        out.push(node);
    }
    out
}

/// Every forest with at most `max_nodes` nodes, linked by single deletions
/// (and so, read backwards, insertions) and relabelings.
pub struct EditGraph {
    forests: Vec<Forest>,
    adjacency: Vec<Vec<u32>>,
    labels: u8,
}

impl EditGraph {
    pub fn build(max_nodes: usize, labels: u8) -> Self {
        let mut memo = HashMap::new();
        let forests: Vec<Forest> = (0..=max_nodes).flat_map(|n| forests(n, labels, &mut memo)).collect();
        let index: HashMap<Vec<u8>, u32> = forests.iter().enumerate().map(|(i, f)| (key(f), i as u32)).collect();
        let mut adjacency = vec![Vec::new(); forests.len()];
        for (i, f) in forests.iter().enumerate() {
            for pos in 0..forest_size(f) {
                let j = index[&key(&delete_at(f, &mut (pos as isize)))];
                adjacency[i].push(j);
                adjacency[j as usize].push(i as u32);
                for label in 0..labels {
                    let g = relabel_at(f, &mut (pos as isize), label);
                    if g != *f {
                        adjacency[i].push(index[&key(&g)]);
                    }
                }
            }
        }
        EditGraph { forests, adjacency, labels }
    }

    pub fn len(&self) -> usize {
        self.forests.len()
    }

    /// Indices of the states that are single trees.
    pub fn trees(&self) -> Vec<usize> {
        (0..self.forests.len()).filter(|&i| self.forests[i].len() == 1).collect()
    }

    pub fn as_ast(&self, i: usize) -> AstNode {
        fn conv(n: &Node) -> AstNode {
            AstNode::new(((b'a' + n.label) as char).to_string(), n.children.iter().map(conv).collect())
        }
        conv(&self.forests[i][0])
    }

    /// Fewest unit edits from state `source` to every state.
    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.forests.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source as u32]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize] + 1;
            for &v in &self.adjacency[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = d;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// A uniformly shaped random tree with `1..=max_nodes` nodes.
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize, labels: &[&str]) -> AstNode {
    let n = rng.random_range(1..=max_nodes);
    // Attach each new node under a random existing node, as its last child.
    let mut parent = vec![usize::MAX];
    for i in 1..n {
        parent.push(rng.random_range(0..i));
    }
    let label: Vec<&str> = (0..n).map(|_| labels[rng.random_range(0..labels.len())]).collect();
    fn build(i: usize, parent: &[usize], label: &[&str]) -> AstNode {
        let kids = (0..parent.len()).filter(|&j| parent[j] == i).map(|j| build(j, parent, label)).collect();
        AstNode::new(label[i], kids)
    }
    build(0, &parent, &label)
}

// ---------------------------------------------------------------------------
// DBSCAN by connected components

/// Reference DBSCAN: core points are those with at least `minpts` points
/// (themselves included) within `eps`; clusters are the connected components
/// of the core graph, numbered by their lowest core index; a border point
/// takes the lowest-numbered cluster among its core neighbors.
pub fn dbscan_reference(points: &[[f64; 2]], eps: f64, minpts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let (dx, dy) = (points[i][0] - points[j][0], points[i][1] - points[j][1]);
        (dx * dx + dy * dy).sqrt() <= eps
    };
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= minpts).collect();

    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while root[r] != r {
            r = root[r];
        }
        root[x] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut root, i), find(&mut root, j));
                root[a.max(b)] = a.min(b);
            }
        }
    }
    let mut cluster_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = vec![None; n];
    for i in 0..n {
        if core[i] {
            let r = find(&mut root, i);
            let next = cluster_of_root.len();
            labels[i] = Some(*cluster_of_root.entry(r).or_insert(next));
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] = (0..n).filter(|&j| core[j] && near(i, j)).filter_map(|j| labels[j]).min();
        }
    }
    labels
}

/// Renames clusters in order of first appearance so that two labelings of
/// the same partition compare equal.
pub fn canonical(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut names = HashMap::new();
    labels
        .iter()
        .map(|l| {
            l.map(|c| {
                let next = names.len();
                *names.entry(c).or_insert(next)
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// AUC by pair counting

/// Share of (positive, negative) pairs ranked correctly, ties counting half.
pub fn auc_pairs(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let mut doubled = 0u64;
    let mut pairs = 0u64;
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi && !yj {
                pairs += 1;
                doubled += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
    }
    (pairs > 0).then(|| doubled as f64 / (2 * pairs) as f64)
}
