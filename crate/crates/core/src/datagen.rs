//! Deterministic synthetic datasets.
//!
//! * [`gen_stripes`]: `n` unit-width groups along dimension 0 with
//!   alternating labels, which axis stumps can only peel off one at a time.
//! * [`gen_hidden_parts`]: parts whose class-conditional measurement
//!   distributions differ, while the pooled distributions coincide.
//! * [`gen_blobs`]: two isotropic Gaussians, a sanity baseline.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripesSpec {
    pub n_groups: usize,
    pub per_group: usize,
    /// Standard deviation of Gaussian noise added to dimension 0.
    pub jitter: f64,
    pub seed: u64,
}

/// Group `g` covers `[g, g + 1)` on dimension 0 and has label 1 for even `g`.
/// Dimension 1 is uniform nuisance on `[0, 1)`.
pub fn gen_stripes(spec: &StripesSpec) -> Result<Dataset> {
    if spec.n_groups < 2 || spec.per_group == 0 {
        return Err(Error::InvalidInput(
            "stripes need n_groups >= 2 and per_group >= 1".into(),
        ));
    }
    if !(spec.jitter >= 0.0 && spec.jitter.is_finite()) {
        return Err(Error::InvalidInput(
            "jitter must be a nonnegative finite value".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_groups * spec.per_group;
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for g in 0..spec.n_groups {
        for _ in 0..spec.per_group {
            let noise: f64 = rng.sample(StandardNormal);
            let x = g as f64 + rng.random::<f64>() + spec.jitter * noise;
            features.push(x);
            features.push(rng.random::<f64>());
            labels.push(u8::from(g % 2 == 0));
        }
    }
    Dataset::new(features, 2, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenPartsSpec {
    pub n_parts: usize,
    /// Samples per part per class.
    pub per_part: usize,
    /// Within-part distance between the class means on dimension 1.
    pub separation: f64,
    /// Standard deviation of the measurement noise on dimension 1.
    pub noise: f64,
    pub seed: u64,
}

/// Half-width of the uniform spread of dimension 0 around each part index.
pub const PART_SPREAD: f64 = 0.25;

/// Part `j` sits around `j` on dimension 0. On dimension 1, class 1 is at
/// `+Δ/2` and class 0 at `-Δ/2` in even parts, and the reverse in odd parts.
///
/// Parts `2m` and `2m + 1` reuse the same noise draws with the class roles
/// swapped, so for an even number of parts the pooled class-1 and class-0
/// multisets on dimension 1 are identical. A trailing unpaired part (odd
/// `n_parts`) breaks that exactness.
///
/// Rows are ordered by part, class 1 before class 0 within a part.
pub fn gen_hidden_parts(spec: &HiddenPartsSpec) -> Result<Dataset> {
    if spec.n_parts < 2 || spec.per_part == 0 {
        return Err(Error::InvalidInput(
            "hidden parts need n_parts >= 2 and per_part >= 1".into(),
        ));
    }
    if !(spec.separation > 0.0 && spec.separation.is_finite()) {
        return Err(Error::InvalidInput("separation must be positive".into()));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::InvalidInput(
            "noise must be a nonnegative finite value".into(),
        ));
    }
    let noise = Normal::new(0.0, spec.noise).expect("validated standard deviation");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.separation / 2.0;
    let k = spec.per_part;

    let mut features = Vec::with_capacity(4 * spec.n_parts * k);
    let mut labels = Vec::with_capacity(2 * spec.n_parts * k);
    let mut high = Vec::new();
    let mut low = Vec::new();
    for part in 0..spec.n_parts {
        if part % 2 == 0 {
            high = (0..k).map(|_| noise.sample(&mut rng)).collect();
            low = (0..k).map(|_| noise.sample(&mut rng)).collect();
        }
        // Even parts: class 1 high, class 0 low. Odd parts swap the roles.
        let (class1, class0): (&[f64], &[f64]) = if part % 2 == 0 {
            (&high, &low)
        } else {
            (&low, &high)
        };
        let sign = if part % 2 == 0 { 1.0 } else { -1.0 };
        for (label, draws, offset) in [(1u8, class1, sign * half), (0u8, class0, -sign * half)] {
            for &e in draws {
                let x = part as f64 + PART_SPREAD * (2.0 * rng.random::<f64>() - 1.0);
                features.push(x);
                features.push(offset + e);
                labels.push(label);
            }
        }
    }
    Dataset::new(features, 2, labels)
}

/// Class 0 centered at the origin, class 1 at `(mean_shift, 0)`, both with
/// identity covariance. Class 0 rows come first.
pub fn gen_blobs(n_per_class: usize, mean_shift: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::InvalidInput("n_per_class must be at least 1".into()));
    }
    if !mean_shift.is_finite() {
        return Err(Error::InvalidInput("mean_shift must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(4 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for label in [0u8, 1] {
        let center = if label == 1 { mean_shift } else { 0.0 };
        for _ in 0..n_per_class {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            features.push(center + a);
            features.push(b);
            labels.push(label);
        }
    }
    Dataset::new(features, 2, labels)
}
