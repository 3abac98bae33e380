//! Multi-threaded forest training.
//!
//! Each tree draws from its own generator stream, so the forest is
//! identical to the sequential `train_forest` regardless of scheduling.

use infoforest_core::forest::{self, Forest};
use infoforest_core::tree::SplitRule;
use infoforest_core::{Dataset, Result, TrainConfig};
use rayon::prelude::*;

pub fn train_forest_parallel(
    dataset: &Dataset,
    cfg: &TrainConfig,
    n_trees: usize,
    seed: u64,
) -> Result<Forest> {
    train_forest_parallel_with_rule(dataset, cfg, n_trees, seed, SplitRule::Information)
}

pub fn train_forest_parallel_with_rule(
    dataset: &Dataset,
    cfg: &TrainConfig,
    n_trees: usize,
    seed: u64,
    rule: SplitRule,
) -> Result<Forest> {
    forest::check_trainable(dataset, cfg, n_trees)?;
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|t| forest::train_tree_with_rule(dataset, cfg, seed, t, rule))
        .collect::<Result<Vec<_>>>()?;
    Forest::from_trees(dataset.dim(), *cfg, seed, trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use infoforest_core::datagen::{gen_stripes, StripesSpec};

    #[test]
    fn matches_sequential_training() {
        let ds = gen_stripes(&StripesSpec {
            n_groups: 6,
            per_group: 20,
            jitter: 0.1,
            seed: 2,
        })
        .unwrap();
        let cfg = TrainConfig::default();
        let seq = forest::train_forest(&ds, &cfg, 8, 42).unwrap();
        let par = train_forest_parallel(&ds, &cfg, 8, 42).unwrap();
        assert_eq!(seq, par);
    }
}
