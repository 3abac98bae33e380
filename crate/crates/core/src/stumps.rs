//! Random feature pools and candidate thresholds.

use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Projection, SampleView};

/// When fresh projections are drawn during tree growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolRefresh {
    #[default]
    PerNode,
    PerTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolConfig {
    pub n_axis: usize,
    pub n_linear: usize,
    pub n_thresholds: usize,
    #[serde(default)]
    pub refresh: PoolRefresh,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            n_axis: 2,
            n_linear: 2,
            n_thresholds: 16,
            refresh: PoolRefresh::PerNode,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_axis + self.n_linear == 0 {
            return Err(Error::InvalidInput(
                "feature pool needs at least one projection".into(),
            ));
        }
        if self.n_thresholds == 0 {
            return Err(Error::InvalidInput(
                "at least one candidate threshold is required".into(),
            ));
        }
        Ok(())
    }
}

/// Finite family of candidate projections searched at a node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePool {
    projections: Vec<Projection>,
    generation_seed: u64,
}

impl FeaturePool {
    pub fn new(projections: Vec<Projection>, generation_seed: u64) -> Result<Self> {
        if projections.is_empty() {
            return Err(Error::InvalidInput("feature pool must be nonempty".into()));
        }
        Ok(Self {
            projections,
            generation_seed,
        })
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub fn generation_seed(&self) -> u64 {
        self.generation_seed
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }
}

/// Draws a pool: `n_axis` distinct axes (all of them, ascending, if
/// `n_axis >= dim`) followed by `n_linear` Gaussian directions of unit norm.
///
/// Consumes exactly one `u64` from `rng`; the pool itself is generated from
/// a private stream seeded by that value.
pub fn generate_pool<R: Rng + ?Sized>(dim: usize, cfg: &PoolConfig, rng: &mut R) -> FeaturePool {
    assert!(dim >= 1, "feature dimension must be at least 1");
    let generation_seed = rng.random::<u64>();
    let mut local = ChaCha8Rng::seed_from_u64(generation_seed);

    let mut projections = Vec::with_capacity(cfg.n_axis.min(dim) + cfg.n_linear);
    if cfg.n_axis >= dim {
        projections.extend((0..dim).map(Projection::axis));
    } else if cfg.n_axis > 0 {
        let mut axes = index::sample(&mut local, dim, cfg.n_axis).into_vec();
        axes.sort_unstable();
        projections.extend(axes.into_iter().map(Projection::axis));
    }
    while projections.len() < cfg.n_axis.min(dim) + cfg.n_linear {
        let weights: Vec<f64> = (0..dim).map(|_| local.sample(StandardNormal)).collect();
        // A zero draw has probability zero but cannot be normalized.
        if let Ok(p) = Projection::linear(weights) {
            projections.push(p);
        }
    }
    FeaturePool {
        projections,
        generation_seed,
    }
}

/// Midpoints between consecutive distinct values found at `n_thresholds`
/// evenly spaced quantile positions of `values`.
///
/// The result is strictly increasing with at most `n_thresholds` entries,
/// and empty when every value is equal. With `n_thresholds >= values.len() - 1`
/// every gap between distinct values gets one.
pub fn thresholds_from_values(values: &[f64], n_thresholds: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < 2 || n_thresholds == 0 {
        return Vec::new();
    }
    let n = sorted.len();
    let mut out: Vec<f64> = (1..=n_thresholds)
        .map(|k| {
            let pos = (k * n / (n_thresholds + 1)).clamp(1, n - 1);
            let v = sorted[pos];
            let j = distinct.partition_point(|&d| d < v).max(1);
            0.5 * (distinct[j - 1] + distinct[j])
        })
        .collect();
    out.dedup();
    out
}

pub fn candidate_thresholds(
    dataset: &Dataset,
    view: &SampleView,
    projection: &Projection,
    n_thresholds: usize,
) -> Result<Vec<f64>> {
    if view.is_empty() {
        return Err(Error::EmptyView);
    }
    projection.check_dim(dataset.dim())?;
    let values: Vec<f64> = view
        .indices()
        .iter()
        .map(|&i| projection.apply(dataset.row(i)))
        .collect();
    Ok(thresholds_from_values(&values, n_thresholds))
}
