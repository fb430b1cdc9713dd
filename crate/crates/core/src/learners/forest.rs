//! Bagged decision trees: bootstrap rows per tree, `floor(sqrt(d))`
//! features per split.

use super::matrix::AttributeMatrix;
use super::tree::{grow, GrowParams, Tree};
use super::Task;
use crate::rng::Pcg32;

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    task: Task,
    trees: Vec<Tree>,
}

impl Forest {
    /// Returns `None` for an empty list or trees with mismatched tasks or
    /// widths.
    pub fn from_trees(task: Task, trees: Vec<Tree>) -> Option<Self> {
        let d = trees.first()?.n_features();
        if trees.iter().any(|t| t.task() != task || t.n_features() != d) {
            return None;
        }
        Some(Forest { task, trees })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n_features(&self) -> usize {
        self.trees[0].n_features()
    }

    /// Majority vote (ties to 0) for classification, mean for regression.
    pub(crate) fn aggregate(&self, x: &[u8]) -> f64 {
        match self.task {
            Task::Classification => {
                let ones = self.trees.iter().filter(|t| t.leaf_value(x) >= 0.5).count();
                f64::from(u8::from(2 * ones > self.trees.len()))
            }
            Task::Regression => self.trees.iter().map(|t| t.leaf_value(x)).sum::<f64>() / self.trees.len() as f64,
        }
    }
}

pub fn default_max_features(d: usize) -> usize {
    ((d as f64).sqrt().floor() as usize).max(1)
}

pub(crate) fn fit_forest(
    x: &AttributeMatrix,
    y: &[f64],
    task: Task,
    n_trees: u32,
    max_depth: Option<u32>,
    rng: &mut Pcg32,
) -> Forest {
    let n = x.rows();
    let params = GrowParams {
        task,
        max_depth,
        max_features: Some(default_max_features(x.cols())),
    };
    let mut counts = vec![0u32; n];
    let trees = (0..n_trees)
        .map(|_| {
            counts.fill(0);
            for _ in 0..n {
                counts[rng.below_usize(n)] += 1;
            }
            grow(x, y, Some(&counts), params, rng)
        })
        .collect();
    Forest { task, trees }
}
