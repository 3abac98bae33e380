//! Ensembles of trees trained on random subsets of the data, with
//! unweighted majority voting.

use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Dataset};
use crate::tree::{self, Node, SplitRule, TrainConfig};

pub const FORMAT_VERSION: u32 = 1;

/// How each tree's training sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sampling {
    /// `M` draws with replacement.
    #[default]
    Bootstrap,
    /// `ceil(fraction · M)` draws without replacement.
    Subsample { fraction: f64 },
    /// Every tree sees the whole dataset.
    Full,
}

impl Sampling {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Sampling::Subsample { fraction } if !(fraction > 0.0 && fraction <= 1.0) => Err(
                Error::InvalidInput("subsample fraction must lie in (0, 1]".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub format_version: u32,
    pub dimension: usize,
    pub config: TrainConfig,
    pub seed: u64,
    pub n_trees: usize,
    pub trees: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: u8,
    /// Fraction of trees voting 1.
    pub vote_fraction: f64,
    pub mean_posterior: f64,
}

/// Generator for tree `index`: one ChaCha stream per tree, so results do not
/// depend on the order trees are trained in.
pub fn tree_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Training sample indices for one tree, drawn from `rng`.
pub fn draw_sample<R: Rng + ?Sized>(n: usize, sampling: Sampling, rng: &mut R) -> Vec<usize> {
    match sampling {
        Sampling::Bootstrap => (0..n).map(|_| rng.random_range(0..n)).collect(),
        Sampling::Subsample { fraction } => {
            let k = libm::ceil(fraction * n as f64).clamp(1.0, n as f64) as usize;
            let mut idx = index::sample(rng, n, k).into_vec();
            idx.sort_unstable();
            idx
        }
        Sampling::Full => (0..n).collect(),
    }
}

/// Trains tree `index` of a forest seeded with `seed`.
pub fn train_tree(dataset: &Dataset, cfg: &TrainConfig, seed: u64, index: usize) -> Result<Node> {
    train_tree_with_rule(dataset, cfg, seed, index, SplitRule::Information)
}

pub fn train_tree_with_rule(
    dataset: &Dataset,
    cfg: &TrainConfig,
    seed: u64,
    index: usize,
    rule: SplitRule,
) -> Result<Node> {
    let mut rng = tree_rng(seed, index);
    let sample = draw_sample(dataset.len(), cfg.sampling, &mut rng);
    let bag = match cfg.sampling {
        Sampling::Full => None,
        _ => Some(dataset.select(&sample)?),
    };
    let data = bag.as_ref().unwrap_or(dataset);
    tree::train_with_rule(data, &data.full_view(), cfg, rule, &mut rng, 0)
}

/// Preconditions shared by every forest trainer.
pub fn check_trainable(dataset: &Dataset, cfg: &TrainConfig, n_trees: usize) -> Result<()> {
    cfg.validate()?;
    if n_trees == 0 {
        return Err(Error::InvalidInput(
            "a forest needs at least one tree".into(),
        ));
    }
    if model::label_distribution(dataset, &dataset.full_view()).is_pure() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn train_forest(
    dataset: &Dataset,
    cfg: &TrainConfig,
    n_trees: usize,
    seed: u64,
) -> Result<Forest> {
    train_forest_with_rule(dataset, cfg, n_trees, seed, SplitRule::Information)
}

/// Sequential forest training with an explicit split rule. `EntropyOnly`
/// is the plain Random Forest reference.
pub fn train_forest_with_rule(
    dataset: &Dataset,
    cfg: &TrainConfig,
    n_trees: usize,
    seed: u64,
    rule: SplitRule,
) -> Result<Forest> {
    check_trainable(dataset, cfg, n_trees)?;
    let trees = (0..n_trees)
        .map(|t| train_tree_with_rule(dataset, cfg, seed, t, rule))
        .collect::<Result<Vec<_>>>()?;
    Forest::from_trees(dataset.dim(), *cfg, seed, trees)
}

impl Forest {
    /// Assembles a forest from trees trained elsewhere (e.g. in parallel).
    pub fn from_trees(
        dimension: usize,
        config: TrainConfig,
        seed: u64,
        trees: Vec<Node>,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidInput(
                "a forest needs at least one tree".into(),
            ));
        }
        let forest = Self {
            format_version: FORMAT_VERSION,
            dimension,
            config,
            seed,
            n_trees: trees.len(),
            trees,
        };
        forest.validate()?;
        Ok(forest)
    }

    /// Validates tree count and stump dimensions.
    pub fn validate(&self) -> Result<()> {
        if self.trees.len() != self.n_trees || self.n_trees == 0 {
            return Err(Error::InvalidInput(
                "tree count does not match n_trees".into(),
            ));
        }
        for tree in &self.trees {
            let mut bad = None;
            tree.visit(|node, _| {
                if let Some(s) = node.split() {
                    if let Err(e) = s.stump.projection.check_dim(self.dimension) {
                        bad.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = bad {
                return Err(e);
            }
        }
        Ok(())
    }

    pub fn predict(&self, features: &[f64]) -> Result<Prediction> {
        predict(self, features)
    }

    /// Row indices tree `index` was trained on, regenerated from the seed.
    pub fn in_bag(&self, index: usize, n_samples: usize) -> Vec<usize> {
        draw_sample(
            n_samples,
            self.config.sampling,
            &mut tree_rng(self.seed, index),
        )
    }

    /// Out-of-bag error on the training data: each sample is voted on only
    /// by trees that did not see it. `None` if no sample is out of bag.
    pub fn oob_error(&self, dataset: &Dataset) -> Result<Option<f64>> {
        self.check_dim(dataset.dim())?;
        let n = dataset.len();
        let mut votes = alloc::vec![(0usize, 0usize); n];
        for (t, tree) in self.trees.iter().enumerate() {
            let mut in_bag = alloc::vec![false; n];
            for i in self.in_bag(t, n) {
                in_bag[i] = true;
            }
            for (i, row) in dataset.rows().enumerate().filter(|(i, _)| !in_bag[*i]) {
                votes[i].0 += 1;
                votes[i].1 += usize::from(tree.route(row).label);
            }
        }
        let (mut counted, mut wrong) = (0usize, 0usize);
        for (i, &(n_votes, ones)) in votes.iter().enumerate() {
            if n_votes > 0 {
                counted += 1;
                let label = u8::from(2 * ones > n_votes);
                wrong += usize::from(label != dataset.label(i));
            }
        }
        Ok((counted > 0).then(|| wrong as f64 / counted as f64))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dimension {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dimension,
                found,
            })
        }
    }
}

/// Unweighted majority vote; a tie predicts 0.
pub fn predict(forest: &Forest, features: &[f64]) -> Result<Prediction> {
    forest.check_dim(features.len())?;
    let (ones, posterior_sum) = forest
        .trees
        .iter()
        .fold((0usize, 0.0), |(ones, post), tree| {
            let leaf = tree.route(features);
            (ones + usize::from(leaf.label), post + leaf.posterior)
        });
    let n = forest.trees.len();
    Ok(Prediction {
        label: u8::from(2 * ones > n),
        vote_fraction: ones as f64 / n as f64,
        mean_posterior: posterior_sum / n as f64,
    })
}
