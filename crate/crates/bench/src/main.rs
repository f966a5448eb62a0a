use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use tswarp::ingest::{generate_synthetic, load_dataset, write_tsv, Shape, SyntheticSpec};
use tswarp::WindowSpec;
use tswarp_bench::{
    assignments_csv, load_all, run, run_bench, summary_csv, umatrix, umatrix_csv, weights_csv,
    Algorithm, MeshChoice, RunOptions, UmatrixOptions,
};

/// DTW clustering with SOM and K-means, pruned by Euclidean and LB_Keogh bounds.
#[derive(Debug, Parser)]
#[command(name = "tswarp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster one dataset and write a JSON report plus per-series assignments.
    Cluster(ClusterArgs),
    /// Run algorithms over every dataset in a directory and write a summary CSV.
    Bench(BenchArgs),
    /// Train an auto-sized SOM and export its U-matrix and node weights.
    Umatrix(UmatrixArgs),
    /// Write a labelled synthetic dataset in UCR TSV format.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Warping window as a fraction of the series length.
    #[arg(long, default_value_t = 0.05, conflicts_with = "window")]
    window_frac: f64,
    /// Warping window in timesteps.
    #[arg(long)]
    window: Option<usize>,
}

impl WindowArgs {
    fn spec(&self) -> Result<WindowSpec> {
        Ok(match self.window {
            Some(w) => WindowSpec::absolute(w),
            None => WindowSpec::fraction(self.window_frac)?,
        })
    }
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// SOM training epochs.
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    /// K-means iterations.
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    /// Number of clusters (default: number of distinct labels).
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    window: WindowArgs,
    /// SOM mesh: `k` nodes, or the auto-sized mesh grouped into k clusters.
    #[arg(long, value_enum, default_value_t = MeshChoice::K)]
    mesh: MeshChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable bound pruning (every candidate gets a DTW computation).
    #[arg(long)]
    no_prune: bool,
    #[arg(long, env = "TSWARP_THREADS", default_value_t = 1)]
    threads: usize,
    /// Rescale every series to zero mean and unit variance first.
    #[arg(long)]
    z_normalize: bool,
    /// Run without pruning first, then with it, and report the speed-up.
    #[arg(long, conflicts_with = "no_prune")]
    compare_prune: bool,
}

impl EngineArgs {
    fn options(&self, algorithm: Algorithm) -> Result<RunOptions> {
        Ok(RunOptions {
            algorithm,
            epochs: self.epochs,
            iterations: self.iterations,
            k: self.k,
            window: self.window.spec()?,
            mesh: self.mesh,
            seed: self.seed,
            prune: !self.no_prune,
            threads: self.threads,
            z_normalize: self.z_normalize,
            compare_prune: self.compare_prune,
        })
    }
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Dataset directory or TSV file.
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Som)]
    algorithm: Algorithm,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of datasets (subdirectories or TSV files).
    dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "som,kmeans")]
    algorithms: Vec<Algorithm>,
    #[command(flatten)]
    engine: EngineArgs,
    /// Add wall-time columns to the summary (implied by --compare-prune).
    #[arg(long)]
    with_timing: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct UmatrixArgs {
    /// Dataset directory or TSV file.
    dataset: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "TSWARP_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    z_normalize: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Template shapes, one cluster each: sine, ramp, square, gaussian_bump.
    #[arg(long, value_delimiter = ',', default_value = "sine,ramp,square")]
    shapes: Vec<Shape>,
    #[arg(long, default_value_t = 50)]
    n_per_cluster: usize,
    #[arg(long, default_value_t = 128)]
    length: usize,
    /// Gaussian noise sigma as a fraction of the smallest template separation.
    #[arg(long, default_value_t = 0.1, conflicts_with = "noise_sigma")]
    noise_frac: f64,
    /// Absolute Gaussian noise sigma.
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset name; files are written as NAME/NAME_TRAIN.tsv under --out-dir.
    #[arg(long, default_value = "Synthetic")]
    name: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let mut spec = SyntheticSpec {
        n_per_cluster: args.n_per_cluster,
        length: args.length,
        shapes: args.shapes.clone(),
        noise_sigma: 0.0,
        seed: args.seed,
    };
    spec.noise_sigma = match args.noise_sigma {
        Some(sigma) => sigma,
        None => args.noise_frac * spec.template_separation().unwrap_or(1.0),
    };
    let dataset = generate_synthetic(&spec)?;
    let dir = args.out_dir.join(&args.name);
    create_dir(&dir)?;
    let path = dir.join(format!("{}_TRAIN.tsv", args.name));
    write_tsv(&dataset, &path)?;
    println!(
        "{} series of length {} (noise sigma {:.4}) written to {}",
        dataset.len(),
        args.length,
        spec.noise_sigma,
        path.display()
    );
    Ok(())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cluster(args: &ClusterArgs) -> Result<()> {
    let opts = args.engine.options(args.algorithm)?;
    let dataset = load_dataset(&args.dataset)
        .with_context(|| format!("loading {}", args.dataset.display()))?;
    let outcome = run(&dataset, &opts)?;
    create_dir(&args.out_dir)?;
    let stem = format!("{}_{}", dataset.name(), args.algorithm);
    let report = write(&args.out_dir, &format!("{stem}_report.json"), &outcome.report.to_json()?)?;
    write(
        &args.out_dir,
        &format!("{stem}_assignments.csv"),
        &assignments_csv(&outcome.assignments)?,
    )?;
    let r = &outcome.report;
    println!(
        "{} {}: {} DTW calls, {} pruned ({:.1}%), ARI {}, report {}",
        r.dataset,
        r.algorithm,
        r.dtw_calls,
        r.pruned,
        r.pruning_percent,
        r.ari.map_or("n/a".to_string(), |a| format!("{a:.4}")),
        report.display()
    );
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let opts = args.engine.options(Algorithm::Som)?;
    let datasets = load_all(&args.dir)?;
    let outcomes = run_bench(&datasets, &args.algorithms, &opts)?;
    create_dir(&args.out_dir)?;
    for o in &outcomes {
        let stem = format!("{}_{}", o.report.dataset, o.report.algorithm);
        write(&args.out_dir, &format!("{stem}_report.json"), &o.report.to_json()?)?;
        write(&args.out_dir, &format!("{stem}_assignments.csv"), &assignments_csv(&o.assignments)?)?;
    }
    let timing = args.with_timing || args.engine.compare_prune;
    let summary = write(&args.out_dir, "summary.csv", &summary_csv(&outcomes, timing)?)?;
    println!("{} runs, summary {}", outcomes.len(), summary.display());
    Ok(())
}

fn export_umatrix(args: &UmatrixArgs) -> Result<()> {
    let opts = UmatrixOptions {
        epochs: args.epochs,
        window: args.window.spec()?,
        seed: args.seed,
        threads: args.threads,
        z_normalize: args.z_normalize,
    };
    let dataset = load_dataset(&args.dataset)
        .with_context(|| format!("loading {}", args.dataset.display()))?;
    let (mesh, grid) = umatrix(&dataset, &opts)?;
    create_dir(&args.out_dir)?;
    let u = write(&args.out_dir, &format!("{}_umatrix.csv", dataset.name()), &umatrix_csv(&grid)?)?;
    write(&args.out_dir, &format!("{}_weights.csv", dataset.name()), &weights_csv(&mesh)?)?;
    info!("mesh side {}", mesh.side());
    println!("{0}x{0} U-matrix written to {1}", mesh.side(), u.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Bench(args) => bench(args),
        Command::Umatrix(args) => export_umatrix(args),
        Command::Generate(args) => generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
