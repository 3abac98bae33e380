//! Stripes-depth experiment: Random Forest (`tau = 0`) against Information
//! Forest on alternating stripes of increasing group count, comparing tree
//! depth, balance, node-type counts and accuracy.

use std::io::Write;

use infoforest_core::datagen::{gen_stripes, StripesSpec};
use infoforest_core::forest::Forest;
use infoforest_core::tree::tree_stats;
use infoforest_core::{Dataset, DivergenceConfig, PoolConfig, Result, Sampling, TrainConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::parallel::train_forest_parallel;

pub const REPORT_HEADER: &str =
    "method,n_groups,repeat,seed,mean_depth,max_depth,mean_balance,kl_nodes,h_nodes,leaves,train_acc,test_acc";

#[derive(Debug, Clone, Serialize)]
pub struct StripesDepthConfig {
    pub n_groups_list: Vec<usize>,
    pub per_group: usize,
    pub jitter: f64,
    pub repeats: usize,
    pub trees: usize,
    pub base_seed: u64,
    /// Candidate thresholds for the Information Forest; the one with the
    /// smallest mean depth at the largest group count is reported.
    pub tau_candidates: Vec<f64>,
    /// Shared settings; `tau` is overridden per method.
    pub train: TrainConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rf,
    If,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rf => "rf",
            Method::If => "if",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub n_groups: usize,
    pub repeat: usize,
    pub seed: u64,
    pub mean_depth: f64,
    pub max_depth: usize,
    pub mean_balance: f64,
    pub kl_nodes: usize,
    pub h_nodes: usize,
    pub leaves: usize,
    pub train_acc: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub chosen_tau: f64,
    /// Mean max-depth at the largest group count for every candidate tau.
    pub tau_depths: Vec<(f64, f64)>,
    pub rows: Vec<BenchRow>,
}

/// Tree settings for the stripes experiment. Every gap between distinct
/// values is a candidate threshold, so RF can cut exactly at stripe borders,
/// and coarse lightly smoothed histograms keep a node's divergence low until
/// KL-nodes have grouped the stripes into small blocks.
pub fn stripes_depth_train_config() -> TrainConfig {
    TrainConfig {
        sampling: Sampling::Full,
        pool: PoolConfig {
            n_thresholds: 4096,
            ..PoolConfig::default()
        },
        divergence: DivergenceConfig {
            bins: 4,
            smoothing: 0.1,
            ..DivergenceConfig::default()
        },
        ..TrainConfig::default()
    }
}

/// Offset between the training and held-out dataset seeds.
const HELD_OUT_SEED_OFFSET: u64 = 0x5eed_0000;

pub fn accuracy(forest: &Forest, data: &Dataset) -> Result<f64> {
    let mut correct = 0usize;
    for (row, &label) in data.rows().zip(data.labels()) {
        correct += usize::from(forest.predict(row)?.label == label);
    }
    Ok(correct as f64 / data.len() as f64)
}

fn measure(
    method: Method,
    n_groups: usize,
    repeat: usize,
    seed: u64,
    forest: &Forest,
    train: &Dataset,
    test: &Dataset,
) -> Result<BenchRow> {
    let stats: Vec<_> = forest.trees.iter().map(tree_stats).collect();
    let n = stats.len() as f64;
    Ok(BenchRow {
        method,
        n_groups,
        repeat,
        seed,
        mean_depth: stats.iter().map(|s| s.depth as f64).sum::<f64>() / n,
        max_depth: stats.iter().map(|s| s.depth).max().unwrap_or(0),
        mean_balance: stats.iter().map(|s| s.balance).sum::<f64>() / n,
        kl_nodes: stats.iter().map(|s| s.n_kl_nodes).sum(),
        h_nodes: stats.iter().map(|s| s.n_h_nodes).sum(),
        leaves: stats.iter().map(|s| s.n_leaves).sum(),
        train_acc: accuracy(forest, train)?,
        test_acc: accuracy(forest, test)?,
    })
}

fn run_method(cfg: &StripesDepthConfig, method: Method, tau: f64) -> Result<Vec<BenchRow>> {
    let train_cfg = TrainConfig { tau, ..cfg.train };
    let jobs: Vec<(usize, usize)> = cfg
        .n_groups_list
        .iter()
        .flat_map(|&n| (0..cfg.repeats).map(move |r| (n, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(n_groups, repeat)| {
            let seed = cfg.base_seed + repeat as u64;
            let spec = StripesSpec {
                n_groups,
                per_group: cfg.per_group,
                jitter: cfg.jitter,
                seed,
            };
            let train = gen_stripes(&spec)?;
            let test = gen_stripes(&StripesSpec {
                seed: seed + HELD_OUT_SEED_OFFSET,
                ..spec
            })?;
            let forest = train_forest_parallel(&train, &train_cfg, cfg.trees, seed)?;
            measure(method, n_groups, repeat, seed, &forest, &train, &test)
        })
        .collect()
}

/// Mean of the per-repeat max-depth at one group count.
pub fn mean_max_depth(rows: &[BenchRow], method: Method, n_groups: usize) -> f64 {
    let depths: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method && r.n_groups == n_groups)
        .map(|r| r.max_depth as f64)
        .collect();
    depths.iter().sum::<f64>() / depths.len().max(1) as f64
}

pub fn run_stripes_depth(cfg: &StripesDepthConfig) -> Result<BenchReport> {
    if cfg.n_groups_list.is_empty() || cfg.repeats == 0 || cfg.tau_candidates.is_empty() {
        return Err(infoforest_core::Error::InvalidInput(
            "bench needs at least one group count, repeat and tau candidate".into(),
        ));
    }
    let largest = *cfg.n_groups_list.iter().max().expect("nonempty list");
    let mut rows = run_method(cfg, Method::Rf, 0.0)?;

    let mut best: Option<(f64, f64, Vec<BenchRow>)> = None;
    let mut tau_depths = Vec::new();
    for &tau in &cfg.tau_candidates {
        let candidate = run_method(cfg, Method::If, tau)?;
        let depth = mean_max_depth(&candidate, Method::If, largest);
        tau_depths.push((tau, depth));
        if best.as_ref().is_none_or(|(_, d, _)| depth < *d) {
            best = Some((tau, depth, candidate));
        }
    }
    let (chosen_tau, _, if_rows) = best.expect("at least one tau candidate");
    rows.extend(if_rows);
    Ok(BenchReport {
        chosen_tau,
        tau_depths,
        rows,
    })
}

pub fn write_report<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method.name(),
            r.n_groups,
            r.repeat,
            r.seed,
            r.mean_depth,
            r.max_depth,
            r.mean_balance,
            r.kl_nodes,
            r.h_nodes,
            r.leaves,
            r.train_acc,
            r.test_acc
        )?;
    }
    out.flush()
}
