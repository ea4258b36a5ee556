//! Zhang-Shasha ordered tree edit distance with unit costs.

use super::ast::{Ast, AstNode};

/// A tree flattened to post-order with leftmost-leaf indices and keyroots,
/// ready for repeated distance queries.
#[derive(Debug, Clone)]
pub struct PreparedTree<'a> {
    labels: Vec<&'a str>,
    /// Post-order index of the leftmost leaf under each node.
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> PreparedTree<'a> {
    pub fn new(root: &'a AstNode) -> Self {
        let mut labels = Vec::new();
        let mut leftmost = Vec::new();
        fn walk<'a>(n: &'a AstNode, labels: &mut Vec<&'a str>, leftmost: &mut Vec<usize>) -> usize {
            let mut first = None;
            for c in &n.children {
                let l = walk(c, labels, leftmost);
                first.get_or_insert(l);
            }
            let idx = labels.len();
            labels.push(&n.label);
            let l = first.unwrap_or(idx);
            leftmost.push(l);
            l
        }
        walk(root, &mut labels, &mut leftmost);

        // A keyroot is the highest post-order node for each distinct leftmost leaf.
        let n = labels.len();
        let mut seen = vec![false; n];
        let mut keyroots = Vec::new();
        for i in (0..n).rev() {
            if !seen[leftmost[i]] {
                seen[leftmost[i]] = true;
                keyroots.push(i);
            }
        }
        keyroots.reverse();
        PreparedTree { labels, leftmost, keyroots }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Edit distance to `other`.
    pub fn distance(&self, other: &PreparedTree<'_>) -> usize {
        let (n, m) = (self.len(), other.len());
        let mut treedist = vec![0usize; n * m];
        let mut forest = vec![0usize; (n + 1) * (m + 1)];
        for &i in &self.keyroots {
            for &j in &other.keyroots {
                self.keyroot_pair(other, i, j, &mut treedist, &mut forest);
            }
        }
        treedist[(n - 1) * m + (m - 1)]
    }

    fn keyroot_pair(&self, other: &PreparedTree<'_>, i: usize, j: usize, treedist: &mut [usize], forest: &mut [usize]) {
        let m = other.len();
        let (li, lj) = (self.leftmost[i], other.leftmost[j]);
        let rows = i - li + 2;
        let cols = j - lj + 2;
        let at = |x: usize, y: usize| x * cols + y;

        forest[at(0, 0)] = 0;
        for x in 1..rows {
            forest[at(x, 0)] = forest[at(x - 1, 0)] + 1;
        }
        for y in 1..cols {
            forest[at(0, y)] = forest[at(0, y - 1)] + 1;
        }
        for x in 1..rows {
            let i1 = li + x - 1;
            for y in 1..cols {
                let j1 = lj + y - 1;
                let del = forest[at(x - 1, y)] + 1;
                let ins = forest[at(x, y - 1)] + 1;
                if self.leftmost[i1] == li && other.leftmost[j1] == lj {
                    let relabel = usize::from(self.labels[i1] != other.labels[j1]);
                    let d = del.min(ins).min(forest[at(x - 1, y - 1)] + relabel);
                    forest[at(x, y)] = d;
                    treedist[i1 * m + j1] = d;
                } else {
                    let px = self.leftmost[i1] - li;
                    let py = other.leftmost[j1] - lj;
                    let d = del.min(ins).min(forest[at(px, py)] + treedist[i1 * m + j1]);
                    forest[at(x, y)] = d;
                }
            }
        }
    }
}

/// Minimum number of node insertions, deletions and relabelings turning `a`
/// into `b`.
pub fn tree_edit_distance(a: &Ast, b: &Ast) -> usize {
    PreparedTree::new(&a.root).distance(&PreparedTree::new(&b.root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turtlelang::parse;

    fn t(label: &str, children: Vec<AstNode>) -> AstNode {
        AstNode::new(label, children)
    }

    fn l(label: &str) -> AstNode {
        AstNode::leaf(label)
    }

    fn d(a: &AstNode, b: &AstNode) -> usize {
        PreparedTree::new(a).distance(&PreparedTree::new(b))
    }

    #[test]
    fn identical_trees() {
        let a = parse("to s :n repeat :n [ move 10 turn 90 ] end").unwrap();
        assert_eq!(tree_edit_distance(&a, &a.clone()), 0);
    }

    #[test]
    fn one_leaf_relabel() {
        let a = parse("move 10").unwrap();
        let b = parse("move 20").unwrap();
        assert_eq!(tree_edit_distance(&a, &b), 1);
    }

    #[test]
    fn single_nodes() {
        assert_eq!(d(&l("a"), &l("a")), 0);
        assert_eq!(d(&l("a"), &l("b")), 1);
    }

    #[test]
    fn classic_zhang_shasha_example() {
        // f(d(a, c(b)), e) vs f(c(d(a, b)), e): distance 2.
        let a = t("f", vec![t("d", vec![l("a"), t("c", vec![l("b")])]), l("e")]);
        let b = t("f", vec![t("c", vec![t("d", vec![l("a"), l("b")])]), l("e")]);
        assert_eq!(d(&a, &b), 2);
        assert_eq!(d(&b, &a), 2);
    }

    #[test]
    fn insertion_of_subtree() {
        let a = t("r", vec![l("x")]);
        let b = t("r", vec![l("x"), t("y", vec![l("z"), l("w")])]);
        assert_eq!(d(&a, &b), 3);
    }

    #[test]
    fn deletion_lifts_children() {
        // Removing the middle node keeps its children in place.
        let a = t("r", vec![t("m", vec![l("x"), l("y")])]);
        let b = t("r", vec![l("x"), l("y")]);
        assert_eq!(d(&a, &b), 1);
    }

    #[test]
    fn keyroots_of_small_tree() {
        let a = t("f", vec![t("d", vec![l("a"), t("c", vec![l("b")])]), l("e")]);
        let p = PreparedTree::new(&a);
        // post-order: a b c d e f
        assert_eq!(p.labels, vec!["a", "b", "c", "d", "e", "f"]);
        assert_eq!(p.leftmost, vec![0, 1, 1, 0, 4, 0]);
        assert_eq!(p.keyroots, vec![2, 4, 5]);
    }
}
