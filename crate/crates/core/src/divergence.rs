//! Histogram density estimates, label entropy, KL divergence, and the split
//! scores used by the tree trainer.
//!
//! Every divergence is computed between the class-1 and class-0 histograms of
//! a scalar projection. A node's divergence is the maximum over the
//! projections of its feature pool, which lower-bounds the divergence of the
//! full feature vectors.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Dataset, LabelDistribution, Projection, SampleView, Stump};
use crate::stumps::FeaturePool;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    /// Number of equal-width bins per projection.
    pub bins: usize,
    /// Pseudo-count added to every bin.
    pub smoothing: f64,
    /// Use `kl(p, q) + kl(q, p)` instead of `kl(p, q)`.
    pub symmetrize: bool,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        Self {
            bins: 16,
            smoothing: 1.0,
            symmetrize: false,
        }
    }
}

impl DivergenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidInput(
                "at least 2 histogram bins are required".into(),
            ));
        }
        if !(self.smoothing > 0.0 && self.smoothing.is_finite()) {
            return Err(Error::InvalidInput(
                "smoothing must be a positive finite pseudo-count".into(),
            ));
        }
        Ok(())
    }
}

/// Smoothed empirical distribution over fixed bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    mass: Vec<f64>,
    raw_count: usize,
}

impl Histogram {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Number of values the histogram was built from.
    pub fn raw_count(&self) -> usize {
        self.raw_count
    }

    pub fn bins(&self) -> usize {
        self.mass.len()
    }
}

/// `bins + 1` equal-width edges spanning `[lo, hi]`; the last edge is `hi` exactly.
pub fn equal_width_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let width = hi - lo;
    let mut edges: Vec<f64> = (0..bins)
        .map(|b| lo + width * (b as f64 / bins as f64))
        .collect();
    edges.push(hi);
    edges
}

#[inline]
fn bin_index(edges: &[f64], value: f64) -> usize {
    // Interior edges only: values outside the range clamp to the end bins.
    edges[1..edges.len() - 1].partition_point(|&e| e <= value)
}

/// `mass[b] = (count_b + α) / (n + Bα)`.
pub fn build_histogram(values: &[f64], edges: &[f64], smoothing: f64) -> Result<Histogram> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(
            "histogram edges must be strictly increasing".into(),
        ));
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(Error::InvalidInput("smoothing must be positive".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "histogram values must be finite".into(),
        ));
    }
    let bins = edges.len() - 1;
    let mut counts = alloc::vec![0usize; bins];
    for &v in values {
        counts[bin_index(edges, v)] += 1;
    }
    let denom = values.len() as f64 + bins as f64 * smoothing;
    let mass = counts
        .iter()
        .map(|&c| (c as f64 + smoothing) / denom)
        .collect();
    Ok(Histogram {
        edges: edges.to_vec(),
        mass,
        raw_count: values.len(),
    })
}

/// Shannon entropy of the label distribution in nats; 0 when empty or pure.
pub fn entropy(dist: LabelDistribution) -> f64 {
    let n = dist.total();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    [dist.count0, dist.count1]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum()
}

/// `Σ_b p_b ln(p_b / q_b)` in nats.
pub fn kl(p: &Histogram, q: &Histogram) -> Result<f64> {
    if p.edges != q.edges {
        return Err(Error::EdgeMismatch);
    }
    Ok(kl_mass(&p.mass, &q.mass))
}

#[inline]
fn kl_mass(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pb, &qb)| pb * libm::log(pb / qb))
        .sum()
}

/// `kl(p, q)`, or `kl(p, q) + kl(q, p)` when `symmetrize` is set.
pub fn divergence(p: &Histogram, q: &Histogram, symmetrize: bool) -> Result<f64> {
    let forward = kl(p, q)?;
    if symmetrize {
        Ok(forward + kl(q, p)?)
    } else {
        Ok(forward)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeDivergence {
    Value(f64),
    /// Fewer than two classes present; the divergence is undefined.
    SingleClass,
}

impl NodeDivergence {
    pub fn value(self) -> Option<f64> {
        match self {
            NodeDivergence::Value(v) => Some(v),
            NodeDivergence::SingleClass => None,
        }
    }

    /// Contribution to a weighted split score: undefined counts as zero.
    pub fn or_zero(self) -> f64 {
        self.value().unwrap_or(0.0)
    }
}

/// Divergence of the class-1 values against the class-0 values of one
/// projection, with shared equal-width edges over the pooled range. A
/// constant projection has divergence 0. Both classes must be present.
fn projection_divergence(values: &[f64], labels: &[u8], cfg: &DivergenceConfig) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi > lo) {
        return 0.0;
    }
    let edges = equal_width_edges(lo, hi, cfg.bins);
    let mut counts1 = alloc::vec![0usize; cfg.bins];
    let mut counts0 = alloc::vec![0usize; cfg.bins];
    for (&v, &l) in values.iter().zip(labels) {
        let b = bin_index(&edges, v);
        if l == 0 {
            counts0[b] += 1;
        } else {
            counts1[b] += 1;
        }
    }
    let mass = |counts: &[usize]| -> Vec<f64> {
        let n: usize = counts.iter().sum();
        let denom = n as f64 + cfg.bins as f64 * cfg.smoothing;
        counts
            .iter()
            .map(|&c| (c as f64 + cfg.smoothing) / denom)
            .collect()
    };
    let p1 = mass(&counts1);
    let p0 = mass(&counts0);
    let forward = kl_mass(&p1, &p0);
    if cfg.symmetrize {
        forward + kl_mass(&p0, &p1)
    } else {
        forward
    }
}

/// Samples of a view projected through each projection of a pool,
/// stored column-wise alongside their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Projected {
    columns: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl Projected {
    pub fn new(dataset: &Dataset, view: &SampleView, projections: &[Projection]) -> Result<Self> {
        for p in projections {
            p.check_dim(dataset.dim())?;
        }
        let columns = projections
            .iter()
            .map(|p| {
                view.indices()
                    .iter()
                    .map(|&i| p.apply(dataset.row(i)))
                    .collect()
            })
            .collect();
        let labels = view.indices().iter().map(|&i| dataset.label(i)).collect();
        Ok(Self { columns, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label_distribution(&self) -> LabelDistribution {
        LabelDistribution::from_labels(self.labels.iter().copied())
    }

    /// Maximum projection divergence over all columns.
    pub fn divergence(&self, cfg: &DivergenceConfig) -> NodeDivergence {
        if self.label_distribution().is_pure() {
            return NodeDivergence::SingleClass;
        }
        let best = self
            .columns
            .iter()
            .map(|c| projection_divergence(c, &self.labels, cfg))
            .fold(0.0, f64::max);
        NodeDivergence::Value(best)
    }

    /// Splits on `column >= threshold`, returning (upper, lower).
    pub fn split(&self, column: usize, threshold: f64) -> (Projected, Projected) {
        let mask: Vec<bool> = self.columns[column]
            .iter()
            .map(|&v| v >= threshold)
            .collect();
        let take = |side: bool| Projected {
            columns: self
                .columns
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&mask)
                        .filter(|(_, &m)| m == side)
                        .map(|(&v, _)| v)
                        .collect()
                })
                .collect(),
            labels: self
                .labels
                .iter()
                .zip(&mask)
                .filter(|(_, &m)| m == side)
                .map(|(&l, _)| l)
                .collect(),
        };
        (take(true), take(false))
    }

    /// Size-weighted divergence of the two children.
    pub fn kl_split_score(&self, column: usize, threshold: f64, cfg: &DivergenceConfig) -> f64 {
        let n = self.len() as f64;
        let (upper, lower) = self.split(column, threshold);
        let w_upper = upper.len() as f64 / n;
        let w_lower = lower.len() as f64 / n;
        w_upper * upper.divergence(cfg).or_zero() + w_lower * lower.divergence(cfg).or_zero()
    }

    /// Size-weighted label entropy of the two children.
    pub fn entropy_split_score(&self, column: usize, threshold: f64) -> f64 {
        let mut upper = LabelDistribution::default();
        let mut lower = LabelDistribution::default();
        for (&v, &l) in self.columns[column].iter().zip(&self.labels) {
            let side = if v >= threshold {
                &mut upper
            } else {
                &mut lower
            };
            if l == 0 {
                side.count0 += 1;
            } else {
                side.count1 += 1;
            }
        }
        weighted_entropy(upper, lower)
    }
}

fn weighted_entropy(upper: LabelDistribution, lower: LabelDistribution) -> f64 {
    let n = (upper.total() + lower.total()) as f64;
    if n == 0.0 {
        return 0.0;
    }
    upper.total() as f64 / n * entropy(upper) + lower.total() as f64 / n * entropy(lower)
}

/// Maximum over the pool's projections of the class-conditional divergence
/// within `view`.
pub fn node_divergence(
    dataset: &Dataset,
    view: &SampleView,
    pool: &FeaturePool,
    cfg: &DivergenceConfig,
) -> Result<NodeDivergence> {
    Ok(Projected::new(dataset, view, pool.projections())?.divergence(cfg))
}

/// `|S|/|view| · d(S) + |Sᶜ|/|view| · d(Sᶜ)` where `d` is the node divergence
/// of a child and single-class or empty children contribute 0.
pub fn score_kl_split(
    dataset: &Dataset,
    view: &SampleView,
    stump: &Stump,
    pool: &FeaturePool,
    cfg: &DivergenceConfig,
) -> Result<f64> {
    if view.is_empty() {
        return Err(Error::EmptyView);
    }
    let (upper, lower) = model::partition(dataset, view, stump)?;
    let n = view.len() as f64;
    let mut score = 0.0;
    for child in [&upper, &lower] {
        if !child.is_empty() {
            let d = node_divergence(dataset, child, pool, cfg)?.or_zero();
            score += child.len() as f64 / n * d;
        }
    }
    Ok(score)
}

/// Size-weighted label entropy of the two sides of `stump`.
pub fn score_entropy_split(dataset: &Dataset, view: &SampleView, stump: &Stump) -> Result<f64> {
    if view.is_empty() {
        return Err(Error::EmptyView);
    }
    let (upper, lower) = model::partition(dataset, view, stump)?;
    Ok(weighted_entropy(
        model::label_distribution(dataset, &upper),
        model::label_distribution(dataset, &lower),
    ))
}
