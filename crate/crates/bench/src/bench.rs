//! Directory benchmarks and U-matrix export.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use tswarp::ingest::{load_dataset, z_normalize};
use tswarp::som::{u_matrix, SomMesh};
use tswarp::{train, Dataset, Error, MeshMode, SomConfig, WindowSpec};

use crate::run::{run, Algorithm, RunOptions, RunOutcome};

fn is_tsv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsv"))
}

/// Dataset locations under `dir`, sorted by path: every subdirectory holding
/// TSV files, and every top-level TSV file except a `_TEST.tsv` whose
/// `_TRAIN.tsv` sibling already stands for the pair.
pub fn discover(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("reading {}", dir.display()))?;
    entries.sort();

    let mut found = Vec::new();
    for path in entries {
        if path.is_dir() {
            let has_tsv = fs::read_dir(&path)
                .with_context(|| format!("reading {}", path.display()))?
                .filter_map(|e| e.ok())
                .any(|e| is_tsv(&e.path()));
            if has_tsv {
                found.push(path);
            }
        } else if is_tsv(&path) {
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            if let Some(prefix) = name.strip_suffix("_TEST.tsv") {
                if path.with_file_name(format!("{prefix}_TRAIN.tsv")).is_file() {
                    continue;
                }
            }
            found.push(path);
        }
    }
    Ok(found)
}

/// Loads every dataset under `dir`. Variable-length datasets are skipped with
/// a warning; any other load failure aborts.
pub fn load_all(dir: &Path) -> Result<Vec<Dataset>> {
    let paths = discover(dir)?;
    if paths.is_empty() {
        bail!("no datasets found in {}", dir.display());
    }
    let mut datasets = Vec::new();
    for path in paths {
        match load_dataset(&path) {
            Ok(d) => datasets.push(d),
            Err(Error::UnsupportedDataset { name, reason }) => {
                warn!("skipping {name}: {reason}");
            }
            Err(e) => return Err(e).with_context(|| format!("loading {}", path.display())),
        }
    }
    if datasets.is_empty() {
        bail!("no supported datasets in {}", dir.display());
    }
    Ok(datasets)
}

/// Runs every (dataset, algorithm) pair, datasets in order and algorithms in
/// the given order within each dataset.
pub fn run_bench(
    datasets: &[Dataset],
    algorithms: &[Algorithm],
    base: &RunOptions,
) -> Result<Vec<RunOutcome>> {
    if algorithms.is_empty() {
        bail!("at least one algorithm is required");
    }
    let mut outcomes = Vec::with_capacity(datasets.len() * algorithms.len());
    for d in datasets {
        for &algorithm in algorithms {
            info!("running {algorithm} on {} (n={})", d.name(), d.len());
            let opts = RunOptions {
                algorithm,
                ..base.clone()
            };
            let outcome =
                run(d, &opts).with_context(|| format!("{algorithm} on {}", d.name()))?;
            outcomes.push(outcome);
        }
    }
    Ok(outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UmatrixOptions {
    pub epochs: usize,
    pub window: WindowSpec,
    pub seed: u64,
    pub threads: usize,
    pub z_normalize: bool,
}

impl Default for UmatrixOptions {
    fn default() -> Self {
        Self {
            epochs: 10,
            window: WindowSpec::Fraction(0.05),
            seed: 0,
            threads: 1,
            z_normalize: false,
        }
    }
}

/// Trains an auto-sized mesh and returns it with its U-matrix.
pub fn umatrix(dataset: &Dataset, opts: &UmatrixOptions) -> Result<(SomMesh, Vec<Vec<f64>>)> {
    let data = if opts.z_normalize {
        dataset.map_series(|s| Ok(z_normalize(s)))?
    } else {
        dataset.clone()
    };
    let cfg = SomConfig {
        epochs: opts.epochs,
        window: opts.window,
        mesh_mode: MeshMode::Auto,
        seed: opts.seed,
        thread_count: opts.threads,
        ..SomConfig::default()
    };
    let run = train(&data, &cfg)?;
    let grid = u_matrix(&run.final_mesh, &cfg.window)?;
    Ok((run.final_mesh, grid))
}
