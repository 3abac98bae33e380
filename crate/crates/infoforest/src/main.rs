use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infoforest::bench::{self, StripesDepthConfig};
use infoforest::dataset_csv::{self, CsvError};
use infoforest::manifest::{self, RunManifest};
use infoforest::model_file::{self, ModelError};
use infoforest::parallel::train_forest_parallel;
use infoforest_core::datagen::{self, HiddenPartsSpec, StripesSpec};
use infoforest_core::tree::tree_stats;
use infoforest_core::{
    Dataset, DivergenceConfig, Error as CoreError, Forest, PoolConfig, PoolRefresh, Sampling,
    TrainConfig,
};

/// Thread count override for parallel tree training.
const THREADS_ENV: &str = "INFOFOREST_THREADS";

#[derive(Parser)]
#[command(
    name = "infoforest",
    version,
    about = "Information Forests: train, predict, inspect and benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset CSV.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Train a forest on a dataset CSV.
    Train(TrainArgs),
    /// Score a CSV with a trained model.
    Predict(PredictArgs),
    /// Run a benchmark experiment.
    Bench(BenchArgs),
    /// Summarize a trained model.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    out: PathBuf,
    /// Manifest path (default: <out>.manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Alternating-label unit-width groups along dimension 0.
    Stripes {
        #[arg(long, default_value_t = 8)]
        n_groups: usize,
        #[arg(long, default_value_t = 100)]
        per_group: usize,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Parts whose class distributions differ only within each part.
    Parts {
        #[arg(long, default_value_t = 4)]
        n_parts: usize,
        #[arg(long, default_value_t = 100)]
        per_part: usize,
        #[arg(long, default_value_t = 2.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Two unit Gaussians shifted along dimension 0.
    Blobs {
        #[arg(long, default_value_t = 500)]
        n_per_class: usize,
        #[arg(long, default_value_t = 3.0)]
        mean_shift: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Bootstrap,
    Subsample,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefreshArg {
    PerNode,
    PerTree,
}

/// Tree-growing settings shared by `train` and `bench`.
#[derive(Args)]
struct GrowArgs {
    /// Minimum information gain (nats) for an H-node split.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 64)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    min_samples: usize,
    /// Axis projections sampled per node.
    #[arg(long, default_value_t = 2)]
    n_axis: usize,
    /// Random unit-norm linear projections per node.
    #[arg(long, default_value_t = 2)]
    n_linear: usize,
    /// Candidate thresholds per projection.
    #[arg(long)]
    n_thresholds: Option<usize>,
    #[arg(long, value_enum, default_value_t = RefreshArg::PerNode)]
    pool_refresh: RefreshArg,
    /// Histogram bins per projection.
    #[arg(long)]
    bins: Option<usize>,
    /// Pseudo-count per histogram bin.
    #[arg(long)]
    smoothing: Option<f64>,
    /// Use the symmetrized (Jeffreys) divergence.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, value_enum)]
    sampling: Option<SamplingArg>,
    #[arg(long, default_value_t = 0.632)]
    subsample_fraction: f64,
}

impl GrowArgs {
    fn config(&self, tau: f64, defaults: &TrainConfig) -> Result<TrainConfig, Failure> {
        let sampling = match self.sampling {
            None => defaults.sampling,
            Some(SamplingArg::Bootstrap) => Sampling::Bootstrap,
            Some(SamplingArg::Full) => Sampling::Full,
            Some(SamplingArg::Subsample) => Sampling::Subsample {
                fraction: self.subsample_fraction,
            },
        };
        let cfg = TrainConfig {
            tau,
            delta: self.delta,
            max_depth: self.max_depth,
            min_samples: self.min_samples,
            pool: PoolConfig {
                n_axis: self.n_axis,
                n_linear: self.n_linear,
                n_thresholds: self.n_thresholds.unwrap_or(defaults.pool.n_thresholds),
                refresh: match self.pool_refresh {
                    RefreshArg::PerNode => PoolRefresh::PerNode,
                    RefreshArg::PerTree => PoolRefresh::PerTree,
                },
            },
            divergence: DivergenceConfig {
                bins: self.bins.unwrap_or(defaults.divergence.bins),
                smoothing: self.smoothing.unwrap_or(defaults.divergence.smoothing),
                symmetrize: self.symmetrize,
            },
            sampling,
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// Divergence threshold (nats); 0 gives a plain Random Forest.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 32)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grow: GrowArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    StripesDepth,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Experiment::StripesDepth)]
    experiment: Experiment,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    n_groups_list: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    per_group: usize,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 1)]
    trees: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Information Forest thresholds to try; the shallowest at the largest
    /// group count is reported.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1.0")]
    tau_list: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    grow: GrowArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum InspectFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// Training CSV, for the out-of-bag error.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InspectFormat::Text)]
    format: InspectFormat,
    /// Manifest path (default: stderr).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

/// Failure classes, each with its own exit code.
enum Failure {
    Usage(String),
    Io(String),
    Data(String),
    Model(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Data(_) => 4,
            Failure::Model(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Data(m) | Failure::Model(m) => m,
        }
    }
}

impl From<CsvError> for Failure {
    fn from(e: CsvError) -> Self {
        match e {
            CsvError::Io { .. } => Failure::Io(e.to_string()),
            CsvError::DimensionMismatch { .. } => Failure::Model(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Model(e.to_string()),
        }
    }
}

fn data_err(e: CoreError) -> Failure {
    match e {
        CoreError::InvalidInput(_) => Failure::Usage(e.to_string()),
        _ => Failure::Data(e.to_string()),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn write_manifest(m: &mut RunManifest, started: Instant, out: &OutArgs) -> Result<(), Failure> {
    m.finish(started.elapsed());
    let path = out
        .manifest
        .clone()
        .unwrap_or_else(|| manifest::default_path(&out.out));
    m.write(&path).map_err(io_err(&path))
}

fn class_counts(ds: &Dataset) -> (usize, usize) {
    let ones = ds.labels().iter().filter(|&&l| l == 1).count();
    (ds.len() - ones, ones)
}

fn cmd_gen(kind: GenKind) -> Result<(), Failure> {
    let started = Instant::now();
    let mut m = RunManifest::new("gen");
    let (ds, out, seed) = match kind {
        GenKind::Stripes {
            n_groups,
            per_group,
            jitter,
            seed,
            out,
        } => {
            let spec = StripesSpec {
                n_groups,
                per_group,
                jitter,
                seed,
            };
            m.config(&serde_json::json!({ "generator": "stripes", "spec": spec }));
            (datagen::gen_stripes(&spec), out, seed)
        }
        GenKind::Parts {
            n_parts,
            per_part,
            separation,
            noise,
            seed,
            out,
        } => {
            let spec = HiddenPartsSpec {
                n_parts,
                per_part,
                separation,
                noise,
                seed,
            };
            m.config(&serde_json::json!({ "generator": "parts", "spec": spec }));
            (datagen::gen_hidden_parts(&spec), out, seed)
        }
        GenKind::Blobs {
            n_per_class,
            mean_shift,
            seed,
            out,
        } => {
            m.config(&serde_json::json!({
                "generator": "blobs",
                "spec": { "n_per_class": n_per_class, "mean_shift": mean_shift, "seed": seed },
            }));
            (datagen::gen_blobs(n_per_class, mean_shift, seed), out, seed)
        }
    };
    let ds = ds.map_err(|e| Failure::Usage(e.to_string()))?;
    let mut bytes = Vec::new();
    dataset_csv::write_dataset(&ds, &mut bytes).map_err(io_err(&out.out))?;
    std::fs::write(&out.out, &bytes).map_err(io_err(&out.out))?;

    let (c0, c1) = class_counts(&ds);
    println!(
        "wrote {} samples (class 0: {c0}, class 1: {c1}) to {}",
        ds.len(),
        out.out.display()
    );
    m.seed = Some(seed);
    m.input("output", &bytes)
        .metric("samples", ds.len())
        .metric("class0", c0)
        .metric("class1", c1);
    write_manifest(&mut m, started, &out)
}

fn node_totals(forest: &Forest) -> (usize, usize, usize) {
    forest
        .trees
        .iter()
        .map(tree_stats)
        .fold((0, 0, 0), |(k, h, l), s| {
            (k + s.n_kl_nodes, h + s.n_h_nodes, l + s.n_leaves)
        })
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let cfg = args.grow.config(args.tau, &TrainConfig::default())?;
    if args.trees == 0 {
        return Err(Failure::Usage("--trees must be at least 1".into()));
    }
    let bytes = dataset_csv::read_bytes(&args.data)?;
    let ds = dataset_csv::parse_dataset(&bytes)?;
    let forest = train_forest_parallel(&ds, &cfg, args.trees, args.seed).map_err(data_err)?;
    model_file::write_model(&forest, &args.out.out)?;

    let (kl, h, leaves) = node_totals(&forest);
    let depths: Vec<usize> = forest.trees.iter().map(|t| tree_stats(t).depth).collect();
    let mean_depth = depths.iter().sum::<usize>() as f64 / depths.len() as f64;
    let train_acc = bench::accuracy(&forest, &ds).map_err(data_err)?;
    let oob = forest.oob_error(&ds).map_err(data_err)?;
    println!(
        "trained {} trees on {} samples: KL nodes {kl}, H nodes {h}, leaves {leaves}, mean depth {mean_depth:.2}, train accuracy {train_acc:.4}",
        forest.n_trees,
        ds.len()
    );

    let mut m = RunManifest::new("train");
    m.config(&serde_json::json!({ "train": cfg, "trees": args.trees }));
    m.seed = Some(args.seed);
    m.input("data", &bytes)
        .metric("n_kl_nodes", kl)
        .metric("n_h_nodes", h)
        .metric("n_leaves", leaves)
        .metric("mean_depth", mean_depth)
        .metric("max_depth", depths.iter().max().copied().unwrap_or(0))
        .metric("train_accuracy", train_acc)
        .metric("oob_error", oob);
    write_manifest(&mut m, started, &args.out)
}

fn cmd_predict(args: PredictArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let model_bytes = std::fs::read(&args.model).map_err(io_err(&args.model))?;
    let forest = model_file::deserialize(&model_bytes)?;
    let bytes = dataset_csv::read_bytes(&args.data)?;
    let inputs = dataset_csv::parse_inputs(&bytes, forest.dimension)?;
    let predictions = dataset_csv::predict_rows(&forest, &inputs.rows)
        .map_err(|e| Failure::Model(e.to_string()))?;
    let mut out = Vec::new();
    dataset_csv::write_predictions(&predictions, &mut out).map_err(io_err(&args.out.out))?;
    std::fs::write(&args.out.out, &out).map_err(io_err(&args.out.out))?;

    let mut m = RunManifest::new("predict");
    m.config(&serde_json::json!({ "model_config": forest.config, "trees": forest.n_trees }));
    m.seed = Some(forest.seed);
    m.input("model", &model_bytes)
        .input("data", &bytes)
        .metric("rows", predictions.len());
    println!(
        "wrote {} predictions to {}",
        predictions.len(),
        args.out.out.display()
    );
    if let Some(labels) = &inputs.labels {
        let correct = predictions
            .iter()
            .zip(labels)
            .filter(|(p, &l)| p.label == l)
            .count();
        let acc = correct as f64 / labels.len() as f64;
        println!("accuracy {acc:.4} ({correct}/{})", labels.len());
        m.metric("accuracy", acc);
    }
    write_manifest(&mut m, started, &args.out)
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let Experiment::StripesDepth = args.experiment;
    let train = args
        .grow
        .config(0.0, &bench::stripes_depth_train_config())?;
    if args.trees == 0 {
        return Err(Failure::Usage("--trees must be at least 1".into()));
    }
    let cfg = StripesDepthConfig {
        n_groups_list: args.n_groups_list,
        per_group: args.per_group,
        jitter: args.jitter,
        repeats: args.repeats,
        trees: args.trees,
        base_seed: args.seed,
        tau_candidates: args.tau_list,
        train,
    };
    let report = bench::run_stripes_depth(&cfg).map_err(data_err)?;
    let mut out = Vec::new();
    bench::write_report(&report.rows, &mut out).map_err(io_err(&args.out.out))?;
    std::fs::write(&args.out.out, &out).map_err(io_err(&args.out.out))?;

    println!(
        "chosen tau {} (mean max depth at largest n per tau: {:?})",
        report.chosen_tau, report.tau_depths
    );
    for method in [bench::Method::Rf, bench::Method::If] {
        let depths: Vec<String> = cfg
            .n_groups_list
            .iter()
            .map(|&n| {
                format!(
                    "n={n}: {:.1}",
                    bench::mean_max_depth(&report.rows, method, n)
                )
            })
            .collect();
        println!("{} mean max depth  {}", method.name(), depths.join("  "));
    }
    println!(
        "wrote {} rows to {}",
        report.rows.len(),
        args.out.out.display()
    );

    let mut m = RunManifest::new("bench");
    m.config(&cfg);
    m.seed = Some(args.seed);
    m.metric("chosen_tau", report.chosen_tau)
        .metric("tau_depths", &report.tau_depths)
        .metric("rows", report.rows.len());
    m.input("report", &out);
    write_manifest(&mut m, started, &args.out)
}

fn cmd_inspect(args: InspectArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let model_bytes = std::fs::read(&args.model).map_err(io_err(&args.model))?;
    let forest = model_file::deserialize(&model_bytes)?;
    let stats: Vec<_> = forest.trees.iter().map(tree_stats).collect();
    let (kl, h, leaves) = node_totals(&forest);

    let mut m = RunManifest::new("inspect");
    m.config(&forest.config);
    m.seed = Some(forest.seed);
    m.input("model", &model_bytes);

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let w = |r: std::io::Result<()>| r.map_err(|e| Failure::Io(e.to_string()));
    match args.format {
        InspectFormat::Csv => {
            w(writeln!(out, "tree,depth,kl_nodes,h_nodes,leaves,balance"))?;
            for (t, s) in stats.iter().enumerate() {
                w(writeln!(
                    out,
                    "{t},{},{},{},{},{}",
                    s.depth, s.n_kl_nodes, s.n_h_nodes, s.n_leaves, s.balance
                ))?;
            }
        }
        InspectFormat::Text => {
            w(writeln!(out, "format version: {}", forest.format_version))?;
            w(writeln!(
                out,
                "dimension: {}  trees: {}  seed: {}",
                forest.dimension, forest.n_trees, forest.seed
            ))?;
            let config = serde_json::to_string_pretty(&forest.config).expect("config serializes");
            w(writeln!(out, "config:\n{config}"))?;
            w(writeln!(
                out,
                "KL nodes: {kl}\nH nodes: {h}\nleaves: {leaves}"
            ))?;
            w(writeln!(out, "per tree:"))?;
            for (t, s) in stats.iter().enumerate() {
                w(writeln!(
                    out,
                    "  tree {t}: depth {} kl {} h {} leaves {} (internal {}) balance {:.4}",
                    s.depth,
                    s.n_kl_nodes,
                    s.n_h_nodes,
                    s.n_leaves,
                    s.n_kl_nodes + s.n_h_nodes,
                    s.balance
                ))?;
            }
            let max_depth = stats.iter().map(|s| s.depth).max().unwrap_or(0);
            let mut histogram = vec![0usize; max_depth + 1];
            for s in &stats {
                histogram[s.depth] += 1;
            }
            w(writeln!(out, "depth histogram:"))?;
            for (d, count) in histogram.iter().enumerate().filter(|(_, &c)| c > 0) {
                w(writeln!(out, "  depth {d}: {count}"))?;
            }
        }
    }
    if let Some(path) = &args.data {
        let bytes = dataset_csv::read_bytes(path)?;
        let ds = dataset_csv::parse_dataset(&bytes)?;
        let oob = forest
            .oob_error(&ds)
            .map_err(|e| Failure::Model(e.to_string()))?;
        match oob {
            Some(e) => w(writeln!(out, "out-of-bag error: {e:.4}"))?,
            None => w(writeln!(
                out,
                "out-of-bag error: n/a (every sample is in bag)"
            ))?,
        }
        m.input("data", &bytes).metric("oob_error", oob);
    }
    m.metric("n_kl_nodes", kl)
        .metric("n_h_nodes", h)
        .metric("n_leaves", leaves);
    m.finish(started.elapsed());
    match &args.manifest {
        Some(path) => m.write(path).map_err(io_err(path)),
        None => {
            eprint!("{}", m.to_json());
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value.parse().map_err(|_| {
            Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got `{value}`"
            ))
        })?;
        // Fails only if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn report(e: impl Display) {
    eprintln!("error: {e}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Inspect(a) => cmd_inspect(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
