//! Dataset, index-subset views, stumps and partitioning.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable row-major feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<u8>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from a row-major buffer of `labels.len() * dim` values.
    pub fn new(features: Vec<f64>, dim: usize, labels: Vec<u8>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "feature dimension must be at least 1".into(),
            ));
        }
        if labels.is_empty() {
            return Err(Error::EmptyView);
        }
        if features.len() != labels.len() * dim {
            return Err(Error::InvalidInput(format!(
                "{} feature values do not form {} rows of width {}",
                features.len(),
                labels.len(),
                dim
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                sample: pos / dim,
                column: pos % dim,
            });
        }
        if let Some((sample, &label)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::InvalidLabel { sample, label });
        }
        Ok(Self {
            features,
            labels,
            dim,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut features = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        Self::new(features, dim, labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.dim)
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn full_view(&self) -> SampleView {
        SampleView((0..self.len()).collect())
    }

    /// Materializes the rows at `indices` (repeats allowed) as a new dataset.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidInput(format!(
                    "sample index {i} out of range"
                )));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(features, self.dim, labels)
    }
}

/// Sorted, duplicate-free subset of sample indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleView(Vec<usize>);

impl SampleView {
    /// Validates that `indices` is strictly ascending and below `n_samples`.
    pub fn new(indices: Vec<usize>, n_samples: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "view indices must be strictly ascending".into(),
            ));
        }
        if indices.last().is_some_and(|&i| i >= n_samples) {
            return Err(Error::InvalidInput("view index out of range".into()));
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Scalar feature `f(y)`: a coordinate or a unit-norm linear combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Projection {
    Axis { dim: usize },
    Linear { weights: Vec<f64> },
}

impl Projection {
    pub fn axis(dim: usize) -> Self {
        Projection::Axis { dim }
    }

    /// Normalizes `weights` to unit Euclidean norm.
    pub fn linear(mut weights: Vec<f64>) -> Result<Self> {
        let norm = libm::sqrt(weights.iter().map(|w| w * w).sum::<f64>());
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(
                "linear projection needs a finite nonzero weight vector".into(),
            ));
        }
        weights.iter_mut().for_each(|w| *w /= norm);
        Ok(Projection::Linear { weights })
    }

    /// Checks that the projection can be applied to vectors of width `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            Projection::Axis { dim: d } if *d < dim => Ok(()),
            Projection::Axis { dim: d } => Err(Error::DimensionMismatch {
                expected: d + 1,
                found: dim,
            }),
            Projection::Linear { weights } if weights.len() == dim => Ok(()),
            Projection::Linear { weights } => Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: dim,
            }),
        }
    }

    /// Applies the projection without checking the row width.
    #[inline]
    pub fn apply(&self, row: &[f64]) -> f64 {
        match self {
            Projection::Axis { dim } => row[*dim],
            Projection::Linear { weights } => weights.iter().zip(row).map(|(w, y)| w * y).sum(),
        }
    }

    pub fn evaluate(&self, features: &[f64]) -> Result<f64> {
        self.check_dim(features.len())?;
        Ok(self.apply(features))
    }
}

/// Decision stump `f(y) >= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub projection: Projection,
    pub threshold: f64,
}

impl Stump {
    pub fn new(projection: Projection, threshold: f64) -> Self {
        Self {
            projection,
            threshold,
        }
    }

    /// Projected value `f(y)`; the threshold is not applied.
    pub fn evaluate(&self, features: &[f64]) -> Result<f64> {
        self.projection.evaluate(features)
    }

    /// Whether `row` falls on the `>=` side. Ties go to that side.
    #[inline]
    pub fn test(&self, row: &[f64]) -> bool {
        self.projection.apply(row) >= self.threshold
    }
}

pub fn evaluate(stump: &Stump, features: &[f64]) -> Result<f64> {
    stump.evaluate(features)
}

/// Splits `view` into (`f >= θ`, `f < θ`), both in ascending order.
pub fn partition(
    dataset: &Dataset,
    view: &SampleView,
    stump: &Stump,
) -> Result<(SampleView, SampleView)> {
    stump.projection.check_dim(dataset.dim())?;
    let (upper, lower): (Vec<usize>, Vec<usize>) = view
        .indices()
        .iter()
        .partition(|&&i| stump.test(dataset.row(i)));
    Ok((SampleView(upper), SampleView(lower)))
}

/// Label tallies over a view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub count0: usize,
    pub count1: usize,
}

impl LabelDistribution {
    pub fn from_labels<I: IntoIterator<Item = u8>>(labels: I) -> Self {
        labels.into_iter().fold(Self::default(), |mut acc, l| {
            if l == 0 {
                acc.count0 += 1;
            } else {
                acc.count1 += 1;
            }
            acc
        })
    }

    pub fn total(&self) -> usize {
        self.count0 + self.count1
    }

    pub fn is_pure(&self) -> bool {
        self.count0 == 0 || self.count1 == 0
    }

    /// Empirical `P(λ = 1)`; 0 for an empty distribution.
    pub fn posterior(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.count1 as f64 / n as f64,
        }
    }

    /// Majority label; an exact tie predicts 0.
    pub fn majority(&self) -> u8 {
        u8::from(self.count1 > self.count0)
    }
}

pub fn label_distribution(dataset: &Dataset, view: &SampleView) -> LabelDistribution {
    LabelDistribution::from_labels(view.indices().iter().map(|&i| dataset.label(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(values: &[f64], labels: &[u8]) -> Dataset {
        Dataset::new(values.to_vec(), 1, labels.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let y = [3.0, 7.0];
        assert_eq!(
            evaluate(&Stump::new(Projection::axis(1), 0.0), &y).unwrap(),
            7.0
        );
        let w = Projection::linear(vec![1.0, 0.0]).unwrap();
        assert_eq!(evaluate(&Stump::new(w, 0.0), &y).unwrap(), 3.0);
        let w = Projection::linear(vec![0.6, 0.8]).unwrap();
        let v = evaluate(&Stump::new(w, 0.0), &[1.0, 1.0]).unwrap();
        assert!((v - 1.4).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_wrong_width() {
        let s = Stump::new(Projection::axis(2), 0.0);
        assert!(matches!(
            s.evaluate(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = Stump::new(Projection::linear(vec![1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            s.evaluate(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_weights_are_normalized() {
        let Projection::Linear { weights } = Projection::linear(vec![3.0, 4.0]).unwrap() else {
            unreachable!()
        };
        assert!((weights[0] - 0.6).abs() < 1e-15 && (weights[1] - 0.8).abs() < 1e-15);
        assert!(Projection::linear(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn partition_examples() {
        let ds = line(&[1.0, 5.0, 9.0], &[0, 1, 0]);
        let view = ds.full_view();
        let (u, l) = partition(&ds, &view, &Stump::new(Projection::axis(0), 4.0)).unwrap();
        assert_eq!(u.indices(), &[1, 2]);
        assert_eq!(l.indices(), &[0]);

        let (u, l) = partition(&ds, &view, &Stump::new(Projection::axis(0), -10.0)).unwrap();
        assert_eq!((u.len(), l.len()), (3, 0));
        let (u, l) = partition(&ds, &view, &Stump::new(Projection::axis(0), 10.0)).unwrap();
        assert_eq!((u.len(), l.len()), (0, 3));
    }

    #[test]
    fn ties_go_to_upper_side() {
        let ds = line(&[1.0, 2.0], &[0, 1]);
        let (u, l) =
            partition(&ds, &ds.full_view(), &Stump::new(Projection::axis(0), 2.0)).unwrap();
        assert_eq!(u.indices(), &[1]);
        assert_eq!(l.indices(), &[0]);
    }

    #[test]
    fn label_distribution_examples() {
        let ds = line(&[0.0, 1.0, 2.0], &[1, 1, 0]);
        let d = label_distribution(&ds, &ds.full_view());
        assert_eq!((d.count0, d.count1), (1, 2));
        assert_eq!(
            label_distribution(&ds, &SampleView::empty()),
            LabelDistribution::default()
        );
    }

    #[test]
    fn majority_tie_predicts_zero() {
        let d = LabelDistribution {
            count0: 2,
            count1: 2,
        };
        assert_eq!(d.majority(), 0);
        assert_eq!(d.posterior(), 0.5);
    }

    #[test]
    fn dataset_validation() {
        assert!(matches!(
            Dataset::new(vec![f64::NAN], 1, vec![0]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            Dataset::new(vec![1.0], 1, vec![2]),
            Err(Error::InvalidLabel { .. })
        ));
        assert!(matches!(
            Dataset::new(vec![], 1, vec![]),
            Err(Error::EmptyView)
        ));
        assert!(Dataset::new(vec![1.0, 2.0, 3.0], 2, vec![0]).is_err());
    }

    #[test]
    fn view_validation() {
        assert!(SampleView::new(vec![0, 2, 5], 6).is_ok());
        assert!(SampleView::new(vec![0, 0], 6).is_err());
        assert!(SampleView::new(vec![2, 1], 6).is_err());
        assert!(SampleView::new(vec![6], 6).is_err());
    }
}
