use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use lwcluster::eval::{
    ensemble_size_sweep, generate_pool, nmi, parse_features, parse_label_vector, pool_matrix,
    theta_sweep, write_summary_csv, ExperimentConfig, FeatureMatrix, KPolicy,
};
use lwcluster::{
    annotate_validity, build_ca, build_dendrogram, build_lwca, cut_dendrogram, lwgp_with_report,
    parse_label_matrix, CoassocMatrix, EnsembleView, Method, DEFAULT_THETA,
};

#[derive(Parser)]
#[command(
    name = "lwcluster",
    version,
    about = "Consensus clustering with uncertainty-weighted clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pool of k-means base clusterings.
    Pool(PoolArgs),
    /// Combine base clusterings into one consensus clustering.
    Consensus(ConsensusArgs),
    /// Print the NMI between predicted and true labels.
    Eval(EvalArgs),
    /// Mean and standard deviation of NMI over parameter grids.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct PoolArgs {
    /// CSV of real features, one row per object.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 100)]
    pool_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConsensusArgs {
    /// Label matrix CSV, one column per base clustering.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value = "lwea")]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the co-association matrix (CA for eac, LWCA otherwise) as a
    /// lower-triangle CSV.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Also write per-cluster size, uncertainty and ECI.
    #[arg(long)]
    validity_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Comma-separated theta values, run at ensemble size `--m`.
    #[arg(long, value_delimiter = ',')]
    theta_grid: Vec<f64>,
    /// Comma-separated ensemble sizes, run at `--theta`.
    #[arg(long, value_delimiter = ',')]
    m_grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    pool_size: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    /// `true`, `best`, or a fixed number of clusters.
    #[arg(long, default_value = "true")]
    k_policy: KPolicyArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy)]
struct KPolicyArg(KPolicy);

impl FromStr for KPolicyArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "true" => Ok(Self(KPolicy::TrueK)),
            "best" => Ok(Self(KPolicy::BestK)),
            _ => s
                .parse()
                .map(|k| Self(KPolicy::Fixed(k)))
                .map_err(|_| format!("expected `true`, `best` or a number, got `{s}`")),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// Writes through a buffer and reports the path on failure.
fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> lwcluster::Result<()>,
) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    body(&mut out).with_context(|| format!("writing {}", path.display()))?;
    out.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_features(path: &Path) -> Result<FeatureMatrix<f64>> {
    parse_features(open(path)?).with_context(|| format!("reading features from {}", path.display()))
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    parse_label_vector(open(path)?)
        .with_context(|| format!("reading labels from {}", path.display()))
}

fn pool(args: PoolArgs) -> Result<()> {
    let features = read_features(&args.features)?;
    let pool = generate_pool(&features, args.pool_size, args.seed)?;
    let matrix = pool_matrix(&pool)?;
    write_file(&args.out, |out| matrix.write_csv(out))?;
    info!(
        "wrote {} clusterings of {} objects",
        pool.len(),
        features.n()
    );
    Ok(())
}

fn consensus(args: ConsensusArgs) -> Result<()> {
    let labels = parse_label_matrix(open(&args.labels)?)
        .with_context(|| format!("reading label matrix from {}", args.labels.display()))?;
    let view = EnsembleView::new(labels);
    let report = annotate_validity(&view, args.theta)?;
    let matrix = |method: Method| -> Result<CoassocMatrix<f64>> {
        Ok(match method {
            Method::Eac => build_ca(&view),
            _ => build_lwca(&view, &report)?,
        })
    };
    let result = match args.method {
        Method::Lwgp => lwgp_with_report(&view, &report, args.k, args.seed)?,
        method => cut_dendrogram(&build_dendrogram(&matrix(method)?)?, args.k, method)?,
    };
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
    write_file(&args.out, |out| result.write_labels(out))?;
    if let Some(path) = &args.dump_matrix {
        let m = matrix(args.method)?;
        write_file(path, |out| m.write_lower_triangle_csv(out))?;
    }
    if let Some(path) = &args.validity_out {
        write_file(path, |out| report.write_csv(&view, out))?;
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let pred = read_labels(&args.pred)?;
    let truth = read_labels(&args.truth)?;
    let score: f64 = nmi(&pred, &truth)?;
    println!("{score:.4}");
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    if args.theta_grid.is_empty() && args.m_grid.is_empty() {
        bail!("give at least one of --theta-grid and --m-grid");
    }
    let features = read_features(&args.features)?;
    let truth = read_labels(&args.truth)?;
    if truth.len() != features.n() {
        bail!(
            "{} ground-truth labels for {} objects",
            truth.len(),
            features.n()
        );
    }
    let config = ExperimentConfig {
        pool_size: args.pool_size,
        ensemble_size: args.m,
        theta: args.theta,
        runs: args.runs,
        k_policy: args.k_policy.0,
        seed: args.seed,
    };
    let pool = generate_pool(&features, config.pool_size, config.seed)?;
    let mut rows = Vec::new();
    if !args.theta_grid.is_empty() {
        rows.extend(theta_sweep(&pool, &truth, &config, &args.theta_grid)?);
    }
    if !args.m_grid.is_empty() {
        rows.extend(ensemble_size_sweep(&pool, &truth, &config, &args.m_grid)?);
    }
    write_file(&args.out, |out| write_summary_csv(&rows, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pool(args) => pool(args),
        Command::Consensus(args) => consensus(args),
        Command::Eval(args) => eval(args),
        Command::Sweep(args) => sweep(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
