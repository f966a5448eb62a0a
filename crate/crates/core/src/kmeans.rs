//! DTW K-means with the same Euclidean/LB_Keogh pruning as the SOM BMU search.
//!
//! Centroids start as `k` distinct input series drawn with the seeded
//! generator and are updated as the pointwise arithmetic mean of their
//! members. The envelope is built on each input series and the lower bound is
//! evaluated against every centroid.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{envelope_with_window, Envelope, WindowSpec};
use crate::error::{Error, Result};
use crate::som::{duration_seconds, nearest_prototype};
use crate::types::{Dataset, Partition, TimeSeries};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k: usize,
    pub iterations: usize,
    pub window: WindowSpec,
    pub seed: u64,
    pub pruning_enabled: bool,
    pub thread_count: usize,
}

impl KmeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            iterations: 10,
            window: WindowSpec::Fraction(0.05),
            seed: 0,
            pruning_enabled: true,
            thread_count: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.thread_count == 0 {
            return Err(Error::InvalidConfig("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub dtw_calls: usize,
    pub pruned: usize,
    #[serde(with = "duration_seconds")]
    pub wall_time: Duration,
    pub reassignments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmeansRun {
    pub partition: Partition,
    pub centroids: Vec<TimeSeries>,
    /// One entry per assignment round actually run; shorter than the
    /// configured iteration count after an early stop.
    pub per_iteration: Vec<IterationStats>,
}

impl KmeansRun {
    pub fn total_dtw_calls(&self) -> usize {
        self.per_iteration.iter().map(|i| i.dtw_calls).sum()
    }

    pub fn total_pruned(&self) -> usize {
        self.per_iteration.iter().map(|i| i.pruned).sum()
    }

    pub fn total_wall_time(&self) -> Duration {
        self.per_iteration.iter().map(|i| i.wall_time).sum()
    }
}

struct Assignment {
    cluster: usize,
    distance_sq: f64,
    dtw_calls: usize,
}

/// Clusters the dataset into `config.k` groups.
///
/// Each round assigns every series to its DTW-nearest centroid (lowest index
/// wins ties), then recomputes centroids as member means. A centroid left
/// without members is reseeded with the series farthest from its own
/// centroid. Stops early when a round changes no assignment.
pub fn kmeans_cluster(dataset: &Dataset, config: &KmeansConfig) -> Result<KmeansRun> {
    config.validate()?;
    let n = dataset.len();
    let m = dataset.series_len().ok_or(Error::EmptyDataset)?;
    if config.k > n {
        return Err(Error::TooManyClusters { k: config.k, n });
    }
    let w = config.window.resolve_checked(m)?;
    let pool = crate::thread_pool(config.thread_count)?;
    let series = dataset.series();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids: Vec<TimeSeries> = index::sample(&mut rng, n, config.k)
        .into_iter()
        .map(|i| series[i].clone())
        .collect();

    let envelopes: Vec<Envelope> = pool.install(|| {
        series
            .par_iter()
            .map(|s| envelope_with_window(s, w))
            .collect()
    });

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut per_iteration = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        let started = Instant::now();
        let current = &centroids;
        let assigned: Vec<Assignment> = pool.install(|| {
            series
                .par_iter()
                .zip(&envelopes)
                .map(|(s, env)| {
                    let (cluster, distance_sq, dtw_calls) =
                        nearest_prototype(current, s, env, w, config.pruning_enabled);
                    Assignment {
                        cluster,
                        distance_sq,
                        dtw_calls,
                    }
                })
                .collect()
        });

        let mut reassignments = 0;
        for (label, a) in labels.iter_mut().zip(&assigned) {
            if *label != Some(a.cluster) {
                reassignments += 1;
                *label = Some(a.cluster);
            }
        }
        let dtw_calls: usize = assigned.iter().map(|a| a.dtw_calls).sum();

        if reassignments > 0 {
            update_centroids(&mut centroids, series, &assigned)?;
        }
        per_iteration.push(IterationStats {
            dtw_calls,
            pruned: n * config.k - dtw_calls,
            wall_time: started.elapsed(),
            reassignments,
        });
        if reassignments == 0 {
            break;
        }
    }

    let assignments = labels
        .into_iter()
        .map(|l| l.expect("every series is assigned in the first round"))
        .collect();
    Ok(KmeansRun {
        partition: Partition::new(assignments, config.k)?,
        centroids,
        per_iteration,
    })
}

fn update_centroids(
    centroids: &mut [TimeSeries],
    series: &[TimeSeries],
    assigned: &[Assignment],
) -> Result<()> {
    let k = centroids.len();
    let m = series[0].len();
    let mut sums = vec![vec![0.0; m]; k];
    let mut counts = vec![0usize; k];
    for (s, a) in series.iter().zip(assigned) {
        counts[a.cluster] += 1;
        for (acc, v) in sums[a.cluster].iter_mut().zip(s.iter()) {
            *acc += v;
        }
    }

    // farthest series first; stable sort keeps the lowest index on ties
    let mut by_distance: Vec<usize> = (0..series.len()).collect();
    by_distance.sort_by(|&a, &b| assigned[b].distance_sq.total_cmp(&assigned[a].distance_sq));
    let mut donors = by_distance.into_iter();

    for (c, (sum, &count)) in sums.into_iter().zip(&counts).enumerate() {
        centroids[c] = if count == 0 {
            let donor = donors.next().expect("k <= n leaves a donor for every empty cluster");
            series[donor].clone()
        } else {
            let count = count as f64;
            TimeSeries::new(sum.into_iter().map(|v| v / count).collect())?
        };
    }
    Ok(())
}
