//! Depth-bounded variance-reduction regression trees.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left, everything else
    /// (including NaN) goes right.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
    pub max_depth: usize,
}

/// How many features each split may look at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureSampling {
    All,
    Subset(usize),
}

pub(crate) struct TreeBuilder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    max_depth: usize,
    sampling: FeatureSampling,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl<'a, R: Rng> TreeBuilder<'a, R> {
    pub(crate) fn new(
        x: &'a [Vec<f64>],
        y: &'a [f64],
        max_depth: usize,
        sampling: FeatureSampling,
        rng: &'a mut R,
    ) -> Self {
        TreeBuilder {
            x,
            y,
            max_depth,
            sampling,
            rng,
            nodes: Vec::new(),
        }
    }

    /// Grows a tree over `rows` (indices into `x`, repeats allowed).
    pub(crate) fn build(mut self, rows: Vec<usize>) -> RegressionTree {
        self.grow(rows, 0);
        RegressionTree {
            nodes: self.nodes,
            max_depth: self.max_depth,
        }
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = rows.len() as f64;
        let sum: f64 = rows.iter().map(|&i| self.y[i]).sum();
        let mean = sum / n;
        self.nodes.push(Node::Leaf { value: mean });
        if depth >= self.max_depth || rows.len() < 2 {
            return id;
        }
        let sse: f64 = rows.iter().map(|&i| (self.y[i] - mean).powi(2)).sum();
        if sse <= 0.0 {
            return id;
        }
        let Some(best) = self.best_split(&rows, sum) else {
            return id;
        };
        if best.gain <= 1e-12 * sse {
            return id;
        }
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        match self.sampling {
            FeatureSampling::Subset(m) if m < d => {
                let mut f = sample(self.rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    /// Largest reduction in squared error. Ties keep the lowest feature
    /// index, then the lowest threshold.
    fn best_split(&mut self, rows: &[usize], total: f64) -> Option<BestSplit> {
        let n = rows.len();
        let base = total * total / n as f64;
        let mut best: Option<BestSplit> = None;
        let mut order = rows.to_vec();
        for feature in self.candidate_features() {
            let x = self.x;
            order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
            let mut left_sum = 0.0;
            for k in 0..n - 1 {
                left_sum += self.y[order[k]];
                let here = x[order[k]][feature];
                let next = x[order[k + 1]][feature];
                if here == next || next.is_nan() {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = (n - k - 1) as f64;
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mut threshold = here + (next - here) / 2.0;
                    // midpoint can round up onto `next` for adjacent floats
                    if threshold >= next {
                        threshold = here;
                    }
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}

impl RegressionTree {
    /// A single-leaf tree.
    pub fn constant(value: f64) -> Self {
        RegressionTree {
            nodes: vec![Node::Leaf { value }],
            max_depth: 0,
        }
    }

    /// Index of the leaf `x` is routed to.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { .. } => return id,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match &self.nodes[self.leaf_index(x)] {
            Node::Leaf { value } => *value,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Highest feature index referenced by a split, if any.
    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .max()
    }
}

/// Fits one tree on all rows with every feature considered at each split.
pub fn fit_tree(x: &[Vec<f64>], y: &[f64], max_depth: usize) -> RegressionTree {
    // the rng is only consulted when sampling feature subsets
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    TreeBuilder::new(x, y, max_depth, FeatureSampling::All, &mut rng).build((0..y.len()).collect())
}
