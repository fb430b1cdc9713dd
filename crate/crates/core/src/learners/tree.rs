//! CART-style decision trees over 8-bit attributes.
//!
//! Splits have the form `x[feature] <= threshold`, with thresholds at the
//! midpoint between consecutive distinct values present in the node.
//! Classification minimises weighted Gini impurity, regression weighted
//! variance. Growth stops at a pure node, at `max_depth`, or when every
//! candidate feature is constant within the node.
//!
//! The builder keeps, for every feature, the node's rows sorted by that
//! feature. Splitting a node stably partitions each of those lists, so no
//! sorting happens after the shared per-matrix presort.

use super::matrix::AttributeMatrix;
use super::Task;
use crate::rng::Pcg32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
    },
}

/// Fitted tree; nodes are stored in preorder with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    task: Task,
    n_features: usize,
    nodes: Vec<Node>,
}

impl Tree {
    /// Builds a tree from preorder nodes, checking that child links are
    /// in bounds and point forward (hence acyclic).
    pub fn from_nodes(task: Task, n_features: usize, nodes: Vec<Node>) -> Option<Self> {
        if nodes.is_empty() {
            return None;
        }
        for (i, node) in nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                left,
                right,
                threshold,
            } = *node
            {
                let ok = (feature as usize) < n_features
                    && (left as usize) > i
                    && (right as usize) > i
                    && (left as usize) < nodes.len()
                    && (right as usize) < nodes.len()
                    && !threshold.is_nan();
                if !ok {
                    return None;
                }
            }
        }
        Some(Tree {
            task,
            n_features,
            nodes,
        })
    }

    /// Single-leaf tree.
    pub fn constant(task: Task, n_features: usize, value: f64) -> Self {
        Tree {
            task,
            n_features,
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            match self.nodes[i] {
                Node::Leaf { .. } => best = best.max(d),
                Node::Split { left, right, .. } => {
                    stack.push((left as usize, d + 1));
                    stack.push((right as usize, d + 1));
                }
            }
        }
        best
    }

    /// Leaf value reached by `x`; the caller checks `x.len()`.
    pub(crate) fn leaf_value(&self, x: &[u8]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if f64::from(x[feature as usize]) <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }
}

/// Tree growth settings.
#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub task: Task,
    pub max_depth: Option<u32>,
    /// Non-constant features to examine per split (random subset). `None`
    /// examines all features in index order.
    pub max_features: Option<usize>,
}

/// Best split found for a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    /// Parent impurity minus the weighted child impurities.
    pub gain: f64,
    pub left_weight: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    w: f64,
    sum: f64,
    sum_sq: f64,
}

impl Stats {
    fn add(&mut self, w: f64, y: f64) {
        self.w += w;
        self.sum += w * y;
        self.sum_sq += w * y * y;
    }

    fn minus(self, other: Stats) -> Stats {
        Stats {
            w: self.w - other.w,
            sum: self.sum - other.sum,
            sum_sq: self.sum_sq - other.sum_sq,
        }
    }

    /// Gini for 0/1 targets (`sum` is the class-1 weight), variance otherwise.
    fn impurity(&self, task: Task) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        let mean = self.sum / self.w;
        match task {
            Task::Classification => 2.0 * mean * (1.0 - mean),
            Task::Regression => (self.sum_sq / self.w - mean * mean).max(0.0),
        }
    }
}

struct Builder<'a> {
    params: GrowParams,
    n_rows: usize,
    n_features: usize,
    columns: &'a [u8],
    y: &'a [f64],
    weights: Vec<f64>,
    /// Rows present in the tree (weight > 0).
    live: usize,
    /// `sorted[f * live + k]`: k-th row of feature f's order, node-partitioned.
    sorted: Vec<u32>,
    go_left: Vec<bool>,
    scratch: Vec<u32>,
    features: Vec<u32>,
}

impl<'a> Builder<'a> {
    fn new(x: &'a AttributeMatrix, y: &'a [f64], counts: Option<&[u32]>, params: GrowParams) -> Self {
        let idx = x.column_index();
        let (n, d) = (x.rows(), x.cols());
        let weights: Vec<f64> = match counts {
            Some(c) => c.iter().map(|&c| f64::from(c)).collect(),
            None => vec![1.0; n],
        };
        let live = weights.iter().filter(|&&w| w > 0.0).count();
        let mut sorted = Vec::with_capacity(live * d);
        if live == n {
            sorted.extend_from_slice(&idx.order);
        } else {
            for f in 0..d {
                sorted.extend(
                    idx.order[f * n..(f + 1) * n]
                        .iter()
                        .copied()
                        .filter(|&r| weights[r as usize] > 0.0),
                );
            }
        }
        Builder {
            params,
            n_rows: n,
            n_features: d,
            columns: &idx.columns,
            y,
            weights,
            live,
            sorted,
            go_left: vec![false; n],
            scratch: vec![0; live],
            features: (0..d as u32).collect(),
        }
    }

    fn column(&self, f: usize) -> &'a [u8] {
        &self.columns[f * self.n_rows..(f + 1) * self.n_rows]
    }

    fn node_rows(&self, start: usize, end: usize) -> &[u32] {
        &self.sorted[start..end]
    }

    fn node_stats(&self, start: usize, end: usize) -> (Stats, bool) {
        let mut stats = Stats::default();
        let rows = self.node_rows(start, end);
        let first = self.y[rows[0] as usize];
        let mut pure = true;
        for &r in rows {
            let r = r as usize;
            stats.add(self.weights[r], self.y[r]);
            pure &= self.y[r] == first;
        }
        (stats, pure)
    }

    fn leaf_value(&self, stats: &Stats) -> f64 {
        match self.params.task {
            // Majority class, ties to 0.
            Task::Classification => f64::from(u8::from(2.0 * stats.sum > stats.w)),
            Task::Regression => stats.sum / stats.w,
        }
    }

    fn best_split_on(
        &self,
        f: usize,
        start: usize,
        end: usize,
        parent: &Stats,
        parent_imp: f64,
    ) -> Option<SplitCandidate> {
        let rows = &self.sorted[f * self.live + start..f * self.live + end];
        let col = self.column(f);
        let task = self.params.task;
        let mut left = Stats::default();
        let mut best: Option<SplitCandidate> = None;
        for k in 0..rows.len() - 1 {
            let r = rows[k] as usize;
            left.add(self.weights[r], self.y[r]);
            let (v, next) = (col[r], col[rows[k + 1] as usize]);
            if v == next {
                continue;
            }
            let right = parent.minus(left);
            let gain =
                parent_imp - (left.w / parent.w) * left.impurity(task) - (right.w / parent.w) * right.impurity(task);
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: (f64::from(v) + f64::from(next)) / 2.0,
                    gain,
                    left_weight: left.w,
                });
            }
        }
        best
    }

    fn is_constant(&self, f: usize, start: usize, end: usize) -> bool {
        let col = self.column(f);
        let base = f * self.live;
        col[self.sorted[base + start] as usize] == col[self.sorted[base + end - 1] as usize]
    }

    fn find_split(&mut self, start: usize, end: usize, stats: &Stats, rng: &mut Pcg32) -> Option<SplitCandidate> {
        let parent_imp = stats.impurity(self.params.task);
        let mut best: Option<SplitCandidate> = None;
        let consider = |me: &Self, f: usize, best: &mut Option<SplitCandidate>| {
            if let Some(c) = me.best_split_on(f, start, end, stats, parent_imp) {
                if best.is_none_or(|b| c.gain > b.gain) {
                    *best = Some(c);
                }
            }
        };
        match self.params.max_features {
            None => {
                for f in 0..self.n_features {
                    if !self.is_constant(f, start, end) {
                        consider(self, f, &mut best);
                    }
                }
            }
            Some(k) => {
                // Partial Fisher-Yates until k non-constant features are seen.
                let mut visited = 0;
                let d = self.n_features;
                for i in 0..d {
                    if visited >= k {
                        break;
                    }
                    let j = i + rng.below_usize(d - i);
                    self.features.swap(i, j);
                    let f = self.features[i] as usize;
                    if self.is_constant(f, start, end) {
                        continue;
                    }
                    visited += 1;
                    consider(self, f, &mut best);
                }
            }
        }
        best
    }

    /// Stably partitions every feature's slice `[start, end)`; returns the
    /// left size.
    fn partition(&mut self, split: &SplitCandidate, start: usize, end: usize) -> usize {
        let col = self.column(split.feature);
        let mut n_left = 0;
        for k in start..end {
            let r = self.sorted[k] as usize;
            let left = f64::from(col[r]) <= split.threshold;
            self.go_left[r] = left;
            n_left += usize::from(left);
        }
        for f in 0..self.n_features {
            let slice = &mut self.sorted[f * self.live + start..f * self.live + end];
            let (mut l, mut rt) = (0, n_left);
            for &r in slice.iter() {
                if self.go_left[r as usize] {
                    self.scratch[l] = r;
                    l += 1;
                } else {
                    self.scratch[rt] = r;
                    rt += 1;
                }
            }
            slice.copy_from_slice(&self.scratch[..end - start]);
        }
        n_left
    }

    fn grow(mut self, rng: &mut Pcg32) -> Tree {
        struct Work {
            start: usize,
            end: usize,
            depth: u32,
            parent: Option<usize>,
        }
        let mut nodes = Vec::new();
        let mut stack = vec![Work {
            start: 0,
            end: self.live,
            depth: 0,
            parent: None,
        }];
        while let Some(work) = stack.pop() {
            let id = nodes.len();
            if let Some(p) = work.parent {
                if let Node::Split { right, .. } = &mut nodes[p] {
                    *right = id as u32;
                }
            }
            let (stats, pure) = self.node_stats(work.start, work.end);
            let capped = self.params.max_depth.is_some_and(|m| work.depth >= m);
            let split = if pure || capped {
                None
            } else {
                self.find_split(work.start, work.end, &stats, rng)
            };
            match split {
                None => nodes.push(Node::Leaf {
                    value: self.leaf_value(&stats),
                }),
                Some(split) => {
                    let n_left = self.partition(&split, work.start, work.end);
                    nodes.push(Node::Split {
                        feature: split.feature as u32,
                        threshold: split.threshold,
                        left: id as u32 + 1,
                        right: 0,
                    });
                    let mid = work.start + n_left;
                    stack.push(Work {
                        start: mid,
                        end: work.end,
                        depth: work.depth + 1,
                        parent: Some(id),
                    });
                    stack.push(Work {
                        start: work.start,
                        end: mid,
                        depth: work.depth + 1,
                        parent: None,
                    });
                }
            }
        }
        Tree {
            task: self.params.task,
            n_features: self.n_features,
            nodes,
        }
    }
}

/// Grows a tree. `counts` are per-row multiplicities (bootstrap draws);
/// rows with count 0 are left out. At least one row must be present.
pub fn grow(x: &AttributeMatrix, y: &[f64], counts: Option<&[u32]>, params: GrowParams, rng: &mut Pcg32) -> Tree {
    // Constant targets need no presorted state.
    let mut live = (0..x.rows()).filter(|&r| counts.is_none_or(|c| c[r] > 0));
    let first = live.next().expect("tree needs at least one row");
    if live.all(|r| y[r] == y[first]) {
        return Tree::constant(params.task, x.cols(), y[first]);
    }
    let builder = Builder::new(x, y, counts, params);
    assert!(builder.live > 0, "tree needs at least one row");
    builder.grow(rng)
}

/// The split the greedy search picks at the root over all rows, or `None`
/// when every feature is constant.
pub fn root_split(x: &AttributeMatrix, y: &[f64], task: Task) -> Option<SplitCandidate> {
    let params = GrowParams {
        task,
        max_depth: None,
        max_features: None,
    };
    let mut builder = Builder::new(x, y, None, params);
    let (stats, _) = builder.node_stats(0, builder.live);
    builder.find_split(0, builder.live, &stats, &mut Pcg32::from_seed(0))
}
