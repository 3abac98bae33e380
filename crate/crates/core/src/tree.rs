//! Recursive tree training, single-tree prediction and structural statistics.
//!
//! Every node first runs the forced-leaf guards, then draws its feature pool
//! and measures the class-conditional divergence of its samples. Above the
//! threshold `tau` the node classifies with the entropy-minimizing stump
//! (H-node), becoming a leaf if the information gain is at most `delta`.
//! At or below `tau` it regroups with the divergence-maximizing stump
//! (KL-node). A `tau` of zero never produces KL-nodes.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::divergence::{self, DivergenceConfig, Projected};
use crate::error::{Error, Result};
use crate::forest::Sampling;
use crate::model::{self, Dataset, LabelDistribution, SampleView, Stump};
use crate::stumps::{self, FeaturePool, PoolConfig, PoolRefresh};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Divergence threshold in nats.
    pub tau: f64,
    /// Minimum information gain in nats for an H-node split.
    pub delta: f64,
    pub max_depth: usize,
    pub min_samples: usize,
    pub pool: PoolConfig,
    pub divergence: DivergenceConfig,
    pub sampling: Sampling,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            delta: 0.01,
            max_depth: 64,
            min_samples: 2,
            pool: PoolConfig::default(),
            divergence: DivergenceConfig::default(),
            sampling: Sampling::Bootstrap,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidInput("tau must be nonnegative".into()));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidInput("delta must be nonnegative".into()));
        }
        if self.max_depth == 0 || self.min_samples == 0 {
            return Err(Error::InvalidInput(
                "max_depth and min_samples must be positive".into(),
            ));
        }
        self.pool.validate()?;
        self.divergence.validate()?;
        self.sampling.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Kl,
    H,
    Leaf,
}

/// Values recorded while training a node.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub n_samples: usize,
    /// Node divergence; absent when a guard fired first or the divergence
    /// test was bypassed.
    pub divergence: Option<f64>,
    /// Score of the selected (or best rejected) stump.
    pub score: Option<f64>,
    /// Parent entropy minus weighted child entropy of that stump.
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub stump: Stump,
    /// `[f >= θ, f < θ]`.
    pub children: Box<[Node; 2]>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub label: u8,
    /// Training fraction of label 1.
    pub posterior: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Node {
    #[serde(rename = "kl")]
    Kl(Split),
    #[serde(rename = "h")]
    H(Split),
    #[serde(rename = "leaf")]
    Leaf(Leaf),
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Kl(_) => NodeKind::Kl,
            Node::H(_) => NodeKind::H,
            Node::Leaf(_) => NodeKind::Leaf,
        }
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        match self {
            Node::Kl(s) | Node::H(s) => &s.diagnostics,
            Node::Leaf(l) => &l.diagnostics,
        }
    }

    pub fn diagnostics_mut(&mut self) -> &mut Diagnostics {
        match self {
            Node::Kl(s) | Node::H(s) => &mut s.diagnostics,
            Node::Leaf(l) => &mut l.diagnostics,
        }
    }

    pub fn split(&self) -> Option<&Split> {
        match self {
            Node::Kl(s) | Node::H(s) => Some(s),
            Node::Leaf(_) => None,
        }
    }

    /// Leaf reached by `row`, without dimension checks.
    pub fn route(&self, row: &[f64]) -> &Leaf {
        let mut node = self;
        loop {
            match node {
                Node::Kl(s) | Node::H(s) => {
                    node = if s.stump.test(row) {
                        &s.children[0]
                    } else {
                        &s.children[1]
                    };
                }
                Node::Leaf(l) => return l,
            }
        }
    }

    /// Preorder visit of every node with its depth.
    pub fn visit<F: FnMut(&Node, usize)>(&self, mut f: F) {
        fn walk<F: FnMut(&Node, usize)>(node: &Node, depth: usize, f: &mut F) {
            f(node, depth);
            if let Some(s) = node.split() {
                walk(&s.children[0], depth + 1, f);
                walk(&s.children[1], depth + 1, f);
            }
        }
        walk(self, 0, &mut f);
    }

    pub fn visit_mut<F: FnMut(&mut Node)>(&mut self, mut f: F) {
        fn walk<F: FnMut(&mut Node)>(node: &mut Node, f: &mut F) {
            f(node);
            if let Node::Kl(s) | Node::H(s) = node {
                let [a, b] = &mut *s.children;
                walk(a, f);
                walk(b, f);
            }
        }
        walk(self, &mut f);
    }
}

/// Which criterion drives internal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRule {
    /// Divergence test, then H-node or KL-node.
    Information,
    /// Skip the divergence test and always entropy-split (plain Random Forest).
    EntropyOnly,
}

struct Grower<'a> {
    dataset: &'a Dataset,
    cfg: &'a TrainConfig,
    rule: SplitRule,
    fixed_pool: Option<FeaturePool>,
}

impl Grower<'_> {
    fn leaf(dist: LabelDistribution, diagnostics: Diagnostics) -> Node {
        Node::Leaf(Leaf {
            label: dist.majority(),
            posterior: dist.posterior(),
            diagnostics,
        })
    }

    fn grow<R: Rng + ?Sized>(&self, view: SampleView, rng: &mut R, depth: usize) -> Node {
        let ds = self.dataset;
        let cfg = self.cfg;
        let dist = model::label_distribution(ds, &view);
        let mut diag = Diagnostics {
            n_samples: view.len(),
            ..Diagnostics::default()
        };

        if dist.is_pure() || view.len() < cfg.min_samples || depth >= cfg.max_depth {
            return Self::leaf(dist, diag);
        }

        let pool = match &self.fixed_pool {
            Some(pool) => pool.clone(),
            None => stumps::generate_pool(ds.dim(), &cfg.pool, rng),
        };
        let projected = Projected::new(ds, &view, pool.projections())
            .expect("pool projections match the dataset dimension");
        let candidates: Vec<(usize, Vec<f64>)> = (0..projected.n_columns())
            .map(|j| {
                (
                    j,
                    stumps::thresholds_from_values(projected.column(j), cfg.pool.n_thresholds),
                )
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();
        if candidates.is_empty() {
            return Self::leaf(dist, diag);
        }

        let parent_entropy = divergence::entropy(dist);
        let node_divergence = match self.rule {
            SplitRule::Information => Some(projected.divergence(&cfg.divergence).or_zero()),
            SplitRule::EntropyOnly => None,
        };
        diag.divergence = node_divergence;
        let classify = match node_divergence {
            None => true,
            Some(d) => cfg.tau == 0.0 || d > cfg.tau,
        };

        let candidate_iter = || {
            candidates
                .iter()
                .flat_map(|(j, ts)| ts.iter().map(move |&t| (*j, t)))
        };
        let ((column, threshold), score, gain) = if classify {
            let mut best = (candidates[0].0, candidates[0].1[0]);
            let mut best_score = f64::INFINITY;
            for (j, t) in candidate_iter() {
                let s = projected.entropy_split_score(j, t);
                if s < best_score {
                    best = (j, t);
                    best_score = s;
                }
            }
            let gain = parent_entropy - best_score;
            diag.score = Some(best_score);
            diag.gain = Some(gain);
            if gain <= cfg.delta {
                return Self::leaf(dist, diag);
            }
            (best, best_score, gain)
        } else {
            let mut best = (candidates[0].0, candidates[0].1[0]);
            let mut best_score = f64::NEG_INFINITY;
            for (j, t) in candidate_iter() {
                let s = projected.kl_split_score(j, t, &cfg.divergence);
                if s > best_score {
                    best = (j, t);
                    best_score = s;
                }
            }
            let gain = parent_entropy - projected.entropy_split_score(best.0, best.1);
            (best, best_score, gain)
        };
        diag.score = Some(score);
        diag.gain = Some(gain);

        let stump = Stump::new(pool.projections()[column].clone(), threshold);
        let (upper, lower) = model::partition(ds, &view, &stump).expect("stump matches dataset");
        debug_assert!(!upper.is_empty() && !lower.is_empty());
        let children = Box::new([
            self.grow(upper, rng, depth + 1),
            self.grow(lower, rng, depth + 1),
        ]);
        let split = Split {
            stump,
            children,
            diagnostics: diag,
        };
        if classify {
            Node::H(split)
        } else {
            Node::Kl(split)
        }
    }
}

/// Grows a subtree over `view` with the given rule. A per-tree pool is drawn
/// once here and shared by every node below.
pub fn train_with_rule<R: Rng + ?Sized>(
    dataset: &Dataset,
    view: &SampleView,
    cfg: &TrainConfig,
    rule: SplitRule,
    rng: &mut R,
    depth: usize,
) -> Result<Node> {
    cfg.validate()?;
    if view.is_empty() {
        return Err(Error::EmptyView);
    }
    let view = SampleView::new(view.indices().to_vec(), dataset.len())?;
    let fixed_pool = match cfg.pool.refresh {
        PoolRefresh::PerNode => None,
        PoolRefresh::PerTree => Some(stumps::generate_pool(dataset.dim(), &cfg.pool, rng)),
    };
    let grower = Grower {
        dataset,
        cfg,
        rule,
        fixed_pool,
    };
    Ok(grower.grow(view, rng, depth))
}

/// Information Forest node training.
pub fn train_node<R: Rng + ?Sized>(
    dataset: &Dataset,
    view: &SampleView,
    cfg: &TrainConfig,
    rng: &mut R,
    depth: usize,
) -> Result<Node> {
    train_with_rule(dataset, view, cfg, SplitRule::Information, rng, depth)
}

/// Reference Random Forest training: identical except the divergence test
/// is never evaluated.
pub fn train_node_entropy_only<R: Rng + ?Sized>(
    dataset: &Dataset,
    view: &SampleView,
    cfg: &TrainConfig,
    rng: &mut R,
    depth: usize,
) -> Result<Node> {
    train_with_rule(dataset, view, cfg, SplitRule::EntropyOnly, rng, depth)
}

/// Label and posterior of the leaf `features` reaches.
pub fn predict_tree(tree: &Node, features: &[f64]) -> Result<(u8, f64)> {
    let mut node = tree;
    loop {
        match node {
            Node::Kl(s) | Node::H(s) => {
                let v = s.stump.evaluate(features)?;
                node = if v >= s.stump.threshold {
                    &s.children[0]
                } else {
                    &s.children[1]
                };
            }
            Node::Leaf(l) => return Ok((l.label, l.posterior)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub depth: usize,
    pub n_kl_nodes: usize,
    pub n_h_nodes: usize,
    pub n_leaves: usize,
    /// Minimum over internal nodes of `2 · min(child sizes) / node size`.
    pub balance: f64,
}

pub fn tree_stats(tree: &Node) -> TreeStats {
    let mut stats = TreeStats {
        depth: 0,
        n_kl_nodes: 0,
        n_h_nodes: 0,
        n_leaves: 0,
        balance: 1.0,
    };
    tree.visit(|node, depth| {
        match node {
            Node::Kl(_) => stats.n_kl_nodes += 1,
            Node::H(_) => stats.n_h_nodes += 1,
            Node::Leaf(_) => {
                stats.n_leaves += 1;
                stats.depth = stats.depth.max(depth);
            }
        }
        if let Some(s) = node.split() {
            let a = s.children[0].diagnostics().n_samples;
            let b = s.children[1].diagnostics().n_samples;
            if a + b > 0 {
                stats.balance = stats.balance.min(2.0 * a.min(b) as f64 / (a + b) as f64);
            }
        }
    });
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Projection;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn leaf(label: u8, posterior: f64, n: usize) -> Node {
        Node::Leaf(Leaf {
            label,
            posterior,
            diagnostics: Diagnostics {
                n_samples: n,
                ..Default::default()
            },
        })
    }

    fn h(stump: Stump, upper: Node, lower: Node) -> Node {
        let n = upper.diagnostics().n_samples + lower.diagnostics().n_samples;
        Node::H(Split {
            stump,
            children: Box::new([upper, lower]),
            diagnostics: Diagnostics {
                n_samples: n,
                ..Default::default()
            },
        })
    }

    fn axis_cfg() -> TrainConfig {
        TrainConfig {
            pool: PoolConfig {
                n_axis: 1,
                n_linear: 0,
                ..PoolConfig::default()
            },
            sampling: Sampling::Full,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn pure_view_is_leaf() {
        let ds = Dataset::new(vec![0.0, 1.0, 2.0], 1, vec![1, 1, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let node = train_node(&ds, &ds.full_view(), &axis_cfg(), &mut rng, 0).unwrap();
        let Node::Leaf(l) = node else {
            panic!("expected leaf")
        };
        assert_eq!((l.label, l.posterior), (1, 1.0));
    }

    #[test]
    fn empty_view_is_rejected() {
        let ds = Dataset::new(vec![0.0], 1, vec![1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = train_node(&ds, &SampleView::empty(), &axis_cfg(), &mut rng, 0).unwrap_err();
        assert_eq!(err, Error::EmptyView);
    }

    #[test]
    fn constant_features_force_leaf() {
        let ds = Dataset::new(vec![1.0; 4], 1, vec![0, 1, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let node = train_node(&ds, &ds.full_view(), &axis_cfg(), &mut rng, 0).unwrap();
        let Node::Leaf(l) = node else {
            panic!("expected leaf")
        };
        assert_eq!((l.label, l.posterior), (0, 0.5));
    }

    #[test]
    fn max_depth_caps_growth() {
        let values: Vec<f64> = (0..32).map(f64::from).collect();
        let labels = (0..32).map(|i| (i % 2) as u8).collect();
        let ds = Dataset::new(values, 1, labels).unwrap();
        let cfg = TrainConfig {
            tau: 0.0,
            delta: 0.0,
            max_depth: 3,
            ..axis_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let node = train_node(&ds, &ds.full_view(), &cfg, &mut rng, 0).unwrap();
        assert!(tree_stats(&node).depth <= 3);
    }

    #[test]
    fn predict_single_leaf() {
        let tree = leaf(0, 0.2, 5);
        assert_eq!(predict_tree(&tree, &[9.0, -3.0]).unwrap(), (0, 0.2));
    }

    #[test]
    fn predict_depth_one() {
        let tree = h(
            Stump::new(Projection::axis(0), 0.0),
            leaf(1, 0.9, 1),
            leaf(0, 0.1, 1),
        );
        assert_eq!(predict_tree(&tree, &[-1.0, 0.0]).unwrap(), (0, 0.1));
        assert_eq!(predict_tree(&tree, &[0.0, 0.0]).unwrap(), (1, 0.9));
        assert!(predict_tree(&tree, &[]).is_err());
    }

    #[test]
    fn stats_of_single_leaf() {
        let s = tree_stats(&leaf(1, 1.0, 3));
        assert_eq!(
            (s.depth, s.n_kl_nodes, s.n_h_nodes, s.n_leaves),
            (0, 0, 0, 1)
        );
        assert_eq!(s.balance, 1.0);
    }

    #[test]
    fn stats_of_perfect_tree() {
        let st = || Stump::new(Projection::axis(0), 0.0);
        let tree = h(
            st(),
            h(st(), leaf(0, 0.0, 1), leaf(1, 1.0, 1)),
            h(st(), leaf(0, 0.0, 1), leaf(1, 1.0, 1)),
        );
        let s = tree_stats(&tree);
        assert_eq!((s.depth, s.n_h_nodes, s.n_leaves), (2, 3, 4));
        assert_eq!(s.balance, 1.0);
        assert_eq!(s.n_leaves, s.n_h_nodes + s.n_kl_nodes + 1);
    }

    #[test]
    fn stats_balance_tracks_worst_split() {
        let st = || Stump::new(Projection::axis(0), 0.0);
        let tree = h(st(), leaf(0, 0.0, 1), leaf(1, 1.0, 3));
        assert_eq!(tree_stats(&tree).balance, 0.5);
    }

    #[test]
    fn large_delta_gives_single_leaf() {
        let values: Vec<f64> = (0..20).map(f64::from).collect();
        let labels = (0..20).map(|i| u8::from(i >= 10)).collect();
        let ds = Dataset::new(values, 1, labels).unwrap();
        let cfg = TrainConfig {
            tau: 0.0,
            delta: core::f64::consts::LN_2,
            ..axis_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let node = train_node(&ds, &ds.full_view(), &cfg, &mut rng, 0).unwrap();
        assert_eq!(node.kind(), NodeKind::Leaf);
    }

    #[test]
    fn per_tree_pool_is_shared() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![f64::from(i), f64::from(i * 7 % 11)])
            .collect();
        let labels = (0..40).map(|i| (i / 3 % 2) as u8).collect();
        let ds = Dataset::from_rows(&rows, labels).unwrap();
        let cfg = TrainConfig {
            tau: 0.0,
            delta: 0.0,
            pool: PoolConfig {
                n_axis: 0,
                n_linear: 1,
                n_thresholds: 8,
                refresh: PoolRefresh::PerTree,
            },
            ..axis_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let node = train_node(&ds, &ds.full_view(), &cfg, &mut rng, 0).unwrap();
        let mut projections = vec![];
        node.visit(|n, _| {
            if let Some(s) = n.split() {
                projections.push(s.stump.projection.clone());
            }
        });
        assert!(projections.len() > 1);
        assert!(projections.windows(2).all(|w| w[0] == w[1]));
    }
}
