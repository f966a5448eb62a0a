//! One clustering run with instrumentation.

use std::fmt;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tswarp::ingest::z_normalize;
use tswarp::metrics::score_all;
use tswarp::som::classify_run;
use tswarp::{
    extract_clusters, kmeans_cluster, problem_size, train, Dataset, GridCoord, KmeansConfig,
    MeshMode, Partition, SomConfig, WindowSpec,
};

use crate::report::{IterationRecord, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Som,
    Kmeans,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Som => "som",
            Algorithm::Kmeans => "kmeans",
        })
    }
}

/// SOM mesh sizing: `auto` trains the `ceil(sqrt(5 sqrt(n)))` square mesh and
/// groups its nodes into `k` clusters; `k` trains a mesh of exactly `k` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshChoice {
    Auto,
    K,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub algorithm: Algorithm,
    pub epochs: usize,
    pub iterations: usize,
    /// Cluster count; the number of distinct labels when absent.
    pub k: Option<usize>,
    pub window: WindowSpec,
    pub mesh: MeshChoice,
    pub seed: u64,
    pub prune: bool,
    pub threads: usize,
    pub z_normalize: bool,
    /// Also run with pruning disabled, first, and report the speed-up.
    pub compare_prune: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Som,
            epochs: 10,
            iterations: 10,
            k: None,
            window: WindowSpec::Fraction(0.05),
            mesh: MeshChoice::K,
            seed: 0,
            prune: true,
            threads: 1,
            z_normalize: false,
            compare_prune: false,
        }
    }
}

/// One line of the per-series assignment file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssignmentRow {
    pub index: usize,
    pub label: Option<i64>,
    pub cluster: usize,
    pub bmu: Option<GridCoord>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub assignments: Vec<AssignmentRow>,
}

struct EngineResult {
    partition: Partition,
    bmus: Option<Vec<GridCoord>>,
    mesh_side: Option<usize>,
    per_iteration: Vec<IterationRecord>,
    dtw_calls: usize,
    pruned: usize,
    wall_time: Duration,
}

fn run_engine(data: &Dataset, k: usize, opts: &RunOptions, prune: bool) -> Result<EngineResult> {
    match opts.algorithm {
        Algorithm::Som => {
            let cfg = SomConfig {
                epochs: opts.epochs,
                window: opts.window,
                mesh_mode: match opts.mesh {
                    MeshChoice::Auto => MeshMode::Auto,
                    MeshChoice::K => MeshMode::Fixed(k),
                },
                seed: opts.seed,
                pruning_enabled: prune,
                thread_count: opts.threads,
                ..SomConfig::default()
            };
            let started = Instant::now();
            let (partition, run) = match opts.mesh {
                MeshChoice::K => classify_run(data, k, &cfg)?,
                MeshChoice::Auto => {
                    let run = train(data, &cfg)?;
                    (extract_clusters(&run, k, &cfg.window)?, run)
                }
            };
            let wall_time = started.elapsed();
            Ok(EngineResult {
                partition,
                mesh_side: Some(run.final_mesh.side()),
                per_iteration: run
                    .per_epoch
                    .iter()
                    .map(|e| IterationRecord::new(e.dtw_calls, e.pruned, e.wall_time))
                    .collect(),
                dtw_calls: run.total_dtw_calls(),
                pruned: run.total_pruned(),
                bmus: Some(run.bmu_per_series),
                wall_time,
            })
        }
        Algorithm::Kmeans => {
            let cfg = KmeansConfig {
                k,
                iterations: opts.iterations,
                window: opts.window,
                seed: opts.seed,
                pruning_enabled: prune,
                thread_count: opts.threads,
            };
            let started = Instant::now();
            let run = kmeans_cluster(data, &cfg)?;
            let wall_time = started.elapsed();
            Ok(EngineResult {
                per_iteration: run
                    .per_iteration
                    .iter()
                    .map(|i| IterationRecord::new(i.dtw_calls, i.pruned, i.wall_time))
                    .collect(),
                dtw_calls: run.total_dtw_calls(),
                pruned: run.total_pruned(),
                partition: run.partition,
                bmus: None,
                mesh_side: None,
                wall_time,
            })
        }
    }
}

/// Runs the configured engine on `dataset` and scores it against the labels
/// when the dataset has them.
pub fn run(dataset: &Dataset, opts: &RunOptions) -> Result<RunOutcome> {
    if opts.compare_prune && !opts.prune {
        bail!("--compare-prune needs pruning enabled; drop --no-prune");
    }
    let data = if opts.z_normalize {
        dataset.map_series(|s| Ok(z_normalize(s)))?
    } else {
        dataset.clone()
    };
    let m = data
        .series_len()
        .ok_or_else(|| anyhow!("dataset {} is empty", data.name()))?;
    let k = match opts.k {
        Some(k) => k,
        None => data.class_count().ok_or_else(|| {
            anyhow!("dataset {} has no labels; pass --k", data.name())
        })?,
    };
    let window = opts
        .window
        .resolve_checked(m)
        .with_context(|| format!("window for series of length {m}"))?;

    let unpruned = if opts.compare_prune {
        Some(run_engine(&data, k, opts, false)?)
    } else {
        None
    };
    let result = run_engine(&data, k, opts, opts.prune)?;

    let scores = match data.label_partition() {
        Some(truth) => Some(score_all(&result.partition, &truth)?),
        None => None,
    };
    let total = result.dtw_calls + result.pruned;
    let wall = result.wall_time.as_secs_f64();
    let is_som = opts.algorithm == Algorithm::Som;
    let report = RunReport {
        dataset: data.name().to_string(),
        algorithm: opts.algorithm,
        n: data.len(),
        m,
        k,
        problem_size: problem_size(&data),
        epochs: is_som.then_some(opts.epochs),
        iterations: (!is_som).then_some(opts.iterations),
        window_frac: match opts.window {
            WindowSpec::Fraction(f) => Some(f),
            WindowSpec::Absolute(_) => None,
        },
        window,
        mesh: is_som.then_some(opts.mesh),
        mesh_side: result.mesh_side,
        seed: opts.seed,
        pruning: opts.prune,
        threads: opts.threads,
        z_normalize: opts.z_normalize,
        dtw_calls: result.dtw_calls,
        pruned: result.pruned,
        pruning_percent: if total == 0 {
            0.0
        } else {
            result.pruned as f64 / total as f64 * 100.0
        },
        wall_time_seconds: wall,
        unpruned_wall_time_seconds: unpruned.as_ref().map(|u| u.wall_time.as_secs_f64()),
        unpruned_dtw_calls: unpruned.as_ref().map(|u| u.dtw_calls),
        speedup_vs_unpruned: unpruned
            .as_ref()
            .map(|u| u.wall_time.as_secs_f64() / wall.max(1e-9)),
        unpruned_assignments_match: unpruned.as_ref().map(|u| u.partition == result.partition),
        ari: scores.map(|s| s.ari),
        ami: scores.map(|s| s.ami),
        ri: scores.map(|s| s.ri),
        homogeneity: scores.map(|s| s.homogeneity),
        completeness: scores.map(|s| s.completeness),
        fms: scores.map(|s| s.fms),
        per_iteration: result.per_iteration,
    };

    let labels = data.labels();
    let assignments = result
        .partition
        .assignments()
        .iter()
        .enumerate()
        .map(|(index, &cluster)| AssignmentRow {
            index,
            label: labels.map(|l| l[index]),
            cluster,
            bmu: result.bmus.as_ref().map(|b| b[index]),
        })
        .collect();
    Ok(RunOutcome {
        report,
        assignments,
    })
}
