//! Brute-force reference implementations shared by the oracle tests.

#![allow(dead_code)]

use infoforest_core::Dataset;

/// Smoothed equal-width histogram over `[lo, hi]`, binned by direct division.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize, alpha: f64) -> Vec<f64> {
    let mut counts = vec![0.0; bins];
    for &v in values {
        let b = ((v - lo) / (hi - lo) * bins as f64).floor();
        counts[(b.max(0.0) as usize).min(bins - 1)] += 1.0;
    }
    let denom = values.len() as f64 + bins as f64 * alpha;
    counts.iter().map(|c| (c + alpha) / denom).collect()
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for b in 0..p.len() {
        total += p[b] * (p[b] / q[b]).ln();
    }
    total
}

pub fn entropy(count0: usize, count1: usize) -> f64 {
    let n = (count0 + count1) as f64;
    let mut h = 0.0;
    for c in [count0, count1] {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.ln();
        }
    }
    h
}

/// Class-1 against class-0 divergence of one projected column; 0 when the
/// range is degenerate or a class is missing.
pub fn column_divergence(values: &[f64], labels: &[u8], bins: usize, alpha: f64) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ones: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(&v, _)| v)
        .collect();
    let zeros: Vec<f64> = values
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(&v, _)| v)
        .collect();
    if !(hi > lo) || ones.is_empty() || zeros.is_empty() {
        return 0.0;
    }
    kl(
        &histogram(&ones, lo, hi, bins, alpha),
        &histogram(&zeros, lo, hi, bins, alpha),
    )
}

/// Max over axis projections `dims` of the column divergence on `rows`.
pub fn axis_divergence(
    ds: &Dataset,
    rows: &[usize],
    dims: &[usize],
    bins: usize,
    alpha: f64,
) -> f64 {
    let labels: Vec<u8> = rows.iter().map(|&i| ds.label(i)).collect();
    dims.iter()
        .map(|&d| {
            let values: Vec<f64> = rows.iter().map(|&i| ds.row(i)[d]).collect();
            column_divergence(&values, &labels, bins, alpha)
        })
        .fold(0.0, f64::max)
}
