//! Exact-split binary trees grown on presorted feature columns.
//!
//! Each node carries, per feature, the indices of its rows in ascending
//! feature order; a split stably partitions those lists, so no node ever
//! re-sorts.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::seeds::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Column-major view of training rows.
pub struct Columns<'a> {
    pub data: &'a [f64],
    pub n_rows: usize,
    pub n_cols: usize,
}

impl Columns<'_> {
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols + col]
    }

    /// Row indices sorted by each column (ties by index).
    pub fn presort(&self) -> Vec<Vec<u32>> {
        (0..self.n_cols)
            .map(|c| {
                let mut idx: Vec<u32> = (0..self.n_rows as u32).collect();
                idx.sort_by(|&a, &b| self.at(a as usize, c).total_cmp(&self.at(b as usize, c)).then(a.cmp(&b)));
                idx
            })
            .collect()
    }
}

/// Split criteria. Statistics are two additive accumulators per row.
pub enum Criterion<'a> {
    /// Weighted Gini; per-row weight and binary label. Leaf value is 1.0
    /// when the weighted positive count exceeds the negative one.
    Gini { weight: &'a [f64], label: &'a [u8] },
    /// Second-order logistic boosting; leaf value `-scale * G / (H + lambda)`.
    Newton { grad: &'a [f64], hess: &'a [f64], lambda: f64, min_child_hess: f64, scale: f64 },
}

impl Criterion<'_> {
    #[inline]
    fn stats(&self, row: usize) -> [f64; 2] {
        match self {
            Criterion::Gini { weight, label } => {
                let w = weight[row];
                if label[row] == 1 {
                    [0.0, w]
                } else {
                    [w, 0.0]
                }
            }
            Criterion::Newton { grad, hess, .. } => [grad[row], hess[row]],
        }
    }

    /// Node score: larger is better; gain = score(L) + score(R) - score(P).
    #[inline]
    fn score(&self, s: [f64; 2]) -> f64 {
        match self {
            // minus the weighted Gini mass n * gini = n - (n0^2 + n1^2)/n
            Criterion::Gini { .. } => {
                let n = s[0] + s[1];
                if n <= 0.0 {
                    0.0
                } else {
                    -(n - (s[0] * s[0] + s[1] * s[1]) / n)
                }
            }
            Criterion::Newton { lambda, .. } => s[0] * s[0] / (s[1] + lambda),
        }
    }

    #[inline]
    fn admissible(&self, s: [f64; 2]) -> bool {
        match self {
            Criterion::Gini { .. } => s[0] + s[1] > 0.0,
            Criterion::Newton { min_child_hess, .. } => s[1] >= *min_child_hess,
        }
    }

    fn leaf(&self, s: [f64; 2]) -> f64 {
        match self {
            Criterion::Gini { .. } => f64::from(u8::from(s[1] > s[0])),
            Criterion::Newton { lambda, scale, .. } => -scale * s[0] / (s[1] + lambda),
        }
    }

    fn pure(&self, s: [f64; 2]) -> bool {
        matches!(self, Criterion::Gini { .. }) && (s[0] == 0.0 || s[1] == 0.0)
    }
}

pub struct GrowConfig {
    pub max_depth: usize,
    /// Features examined per node; `None` means all.
    pub max_features: Option<usize>,
}

pub struct Grower<'a> {
    pub cols: &'a Columns<'a>,
    pub crit: Criterion<'a>,
    pub cfg: GrowConfig,
    /// Accumulated score gain per feature (impurity decrease for Gini).
    pub importance: Vec<f64>,
    go_left: Vec<bool>,
    nodes: Vec<Node>,
}

impl<'a> Grower<'a> {
    pub fn new(cols: &'a Columns<'a>, crit: Criterion<'a>, cfg: GrowConfig) -> Self {
        Grower {
            importance: vec![0.0; cols.n_cols],
            go_left: vec![false; cols.n_rows],
            cols,
            crit,
            cfg,
            nodes: Vec::new(),
        }
    }

    /// Grows a tree over the rows present in `sorted` (one list per column).
    pub fn grow(mut self, sorted: Vec<Vec<u32>>, rng: &mut Rng) -> (Tree, Vec<f64>) {
        self.node(sorted, 0, rng);
        (Tree { nodes: self.nodes }, self.importance)
    }

    fn node(&mut self, sorted: Vec<Vec<u32>>, depth: usize, rng: &mut Rng) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        let mut total = [0.0; 2];
        for &r in &sorted[0] {
            let s = self.crit.stats(r as usize);
            total[0] += s[0];
            total[1] += s[1];
        }
        let leaf_value = self.crit.leaf(total);
        if depth >= self.cfg.max_depth || sorted[0].len() < 2 || self.crit.pure(total) {
            self.nodes[id] = Node::Leaf { value: leaf_value };
            return id;
        }
        let d = self.cols.n_cols;
        let features: Vec<usize> = match self.cfg.max_features {
            Some(m) if m < d => {
                let mut f = sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        };
        let parent = self.crit.score(total);
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            let list = &sorted[f];
            let mut left = [0.0; 2];
            for w in 0..list.len() - 1 {
                let r = list[w] as usize;
                let s = self.crit.stats(r);
                left[0] += s[0];
                left[1] += s[1];
                let v = self.cols.at(r, f);
                let next = self.cols.at(list[w + 1] as usize, f);
                if v == next {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                if !self.crit.admissible(left) || !self.crit.admissible(right) {
                    continue;
                }
                let gain = self.crit.score(left) + self.crit.score(right) - parent;
                if gain > 1e-12 && best.is_none_or(|b| gain > b.0) {
                    let mut thr = v + (next - v) / 2.0;
                    if !(thr < next) || !thr.is_finite() {
                        thr = v;
                    }
                    best = Some((gain, f, thr));
                }
            }
        }
        let Some((gain, feature, threshold)) = best else {
            self.nodes[id] = Node::Leaf { value: leaf_value };
            return id;
        };
        self.importance[feature] += gain;
        for &r in &sorted[feature] {
            self.go_left[r as usize] = self.cols.at(r as usize, feature) <= threshold;
        }
        let mut ls = Vec::with_capacity(d);
        let mut rs = Vec::with_capacity(d);
        for list in sorted {
            let (l, r): (Vec<u32>, Vec<u32>) = list.into_iter().partition(|&r| self.go_left[r as usize]);
            ls.push(l);
            rs.push(r);
        }
        let left = self.node(ls, depth + 1, rng);
        let right = self.node(rs, depth + 1, rng);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn grow_gini(rows: &[[f64; 2]], labels: &[u8], depth: usize) -> (Tree, Vec<f64>) {
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        let cols = Columns { data: &data, n_rows: rows.len(), n_cols: 2 };
        let w = vec![1.0; rows.len()];
        let g = Grower::new(
            &cols,
            Criterion::Gini { weight: &w, label: labels },
            GrowConfig { max_depth: depth, max_features: None },
        );
        g.grow(cols.presort(), &mut seeds::rng(0))
    }

    #[test]
    fn stump_by_hand() {
        // feature 1 separates perfectly between 2.0 and 5.0
        let rows = [[0.0, 1.0], [1.0, 2.0], [0.0, 5.0], [1.0, 7.0]];
        let (t, imp) = grow_gini(&rows, &[0, 0, 1, 1], 1);
        assert_eq!(
            t.nodes[0],
            Node::Split { feature: 1, threshold: 3.5, left: 1, right: 2 }
        );
        assert_eq!(t.predict(&[9.0, 3.4]), 0.0);
        assert_eq!(t.predict(&[9.0, 3.6]), 1.0);
        // root gini mass 4*0.5 = 2, children pure
        assert_eq!(imp, vec![0.0, 2.0]);
    }

    #[test]
    fn xor_needs_depth_two() {
        let rows = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [0, 1, 1, 0];
        let (t, _) = grow_gini(&rows, &y, 1);
        // no single split reduces gini on xor
        assert_eq!(t.nodes.len(), 1);
        let (t, _) = grow_gini(&[rows[0], rows[1], rows[2], rows[3], [0.0, 0.0]], &[0, 1, 1, 0, 0], 3);
        for (r, &l) in rows.iter().zip(&y) {
            assert_eq!(t.predict(r), l as f64);
        }
        assert!(t.depth() <= 3);
    }

    #[test]
    fn constant_features_make_a_leaf() {
        let (t, _) = grow_gini(&[[1.0, 1.0], [1.0, 1.0]], &[0, 1], 5);
        assert_eq!(t.nodes.len(), 1);
    }

    #[test]
    fn newton_leaf_values() {
        // one split on x; leaf = -scale * G / (H + lambda)
        let data = [0.0, 1.0, 2.0, 3.0];
        let cols = Columns { data: &data, n_rows: 4, n_cols: 1 };
        let g = [-0.5, -0.5, 0.5, 0.5];
        let h = [0.25; 4];
        let gr = Grower::new(
            &cols,
            Criterion::Newton { grad: &g, hess: &h, lambda: 1.0, min_child_hess: 0.0, scale: 0.1 },
            GrowConfig { max_depth: 1, max_features: None },
        );
        let (t, _) = gr.grow(cols.presort(), &mut seeds::rng(0));
        assert_eq!(t.predict(&[0.5]), -0.1 * -1.0 / 1.5);
        assert_eq!(t.predict(&[2.5]), -0.1 * 1.0 / 1.5);
    }
}
