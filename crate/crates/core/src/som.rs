//! Self-organizing map over time series with DTW and exact bound pruning.
//!
//! Training follows a batch schedule per epoch:
//!
//! 1. every input series finds its best matching unit (BMU) against the mesh
//!    as it stood at the start of the epoch (parallel over series);
//! 2. the BMU of each series and all nodes in its toroidal neighborhood are
//!    pulled toward the series, sequentially and in input order.
//!
//! Neighborhood radius and learning rate shrink linearly with the epoch.
//!
//! The BMU search prunes with the Euclidean/LB_Keogh cascade: the smallest
//! Euclidean distance over all nodes is the threshold, and DTW runs only on
//! nodes whose lower bound does not exceed it. The BMU found this way is the
//! same node an exhaustive DTW scan returns.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{
    envelope_with_window, squared_dtw, squared_euclidean, squared_lb_keogh, Envelope, WindowSpec,
};
use crate::error::{Error, Result};
use crate::types::{Dataset, GridCoord, Partition, TimeSeries};

/// Relative slack on the pruning threshold. Lower bound, DTW and Euclidean
/// distance are summed in different orders, so an exact tie between a node's
/// lower bound and the threshold can come out a few ulps apart. Admitting
/// those nodes only costs an extra DTW call.
pub(crate) const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshMode {
    /// `ceil(sqrt(5 * sqrt(n)))` nodes per side.
    Auto,
    /// Smallest square holding `k` nodes; only the first `k` in row-major
    /// order can become a BMU.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomConfig {
    pub epochs: usize,
    pub window: WindowSpec,
    pub mesh_mode: MeshMode,
    pub seed: u64,
    pub initial_rate: f64,
    pub pruning_enabled: bool,
    pub thread_count: usize,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            window: WindowSpec::Fraction(0.05),
            mesh_mode: MeshMode::Auto,
            seed: 0,
            initial_rate: 0.9,
            pruning_enabled: true,
            thread_count: 1,
        }
    }
}

impl SomConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.initial_rate > 0.0 && self.initial_rate <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "initial learning rate {} is outside (0, 1]",
                self.initial_rate
            )));
        }
        if self.mesh_mode == MeshMode::Fixed(0) {
            return Err(Error::InvalidConfig("fixed mesh needs k >= 1".into()));
        }
        if self.thread_count == 0 {
            return Err(Error::InvalidConfig("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Nodes per mesh side for `n` input series.
pub fn mesh_side(n: usize, mode: MeshMode) -> usize {
    match mode {
        MeshMode::Auto => {
            let nodes = 5.0 * (n.max(1) as f64).sqrt();
            ((nodes.sqrt() - 1e-9).ceil() as usize).max(1)
        }
        MeshMode::Fixed(k) => {
            let mut side = 1;
            while side * side < k {
                side += 1;
            }
            side
        }
    }
}

/// Square toroidal grid of weight series, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomMesh {
    side: usize,
    eligible: usize,
    weights: Vec<TimeSeries>,
}

impl SomMesh {
    /// Builds a mesh from row-major weights; `eligible` is the number of
    /// leading nodes allowed to become a BMU.
    pub fn from_weights(side: usize, eligible: usize, weights: Vec<TimeSeries>) -> Result<Self> {
        if side == 0 || weights.len() != side * side {
            return Err(Error::InvalidConfig(format!(
                "a mesh of side {side} needs {} weights, got {}",
                side * side,
                weights.len()
            )));
        }
        if eligible == 0 || eligible > weights.len() {
            return Err(Error::InvalidConfig(format!(
                "eligible node count {eligible} is outside 1..={}",
                weights.len()
            )));
        }
        let m = weights[0].len();
        if let Some(bad) = weights.iter().find(|w| w.len() != m) {
            return Err(Error::LengthMismatch {
                left: m,
                right: bad.len(),
            });
        }
        Ok(Self {
            side,
            eligible,
            weights,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Number of nodes that take part in BMU searches.
    pub fn eligible(&self) -> usize {
        self.eligible
    }

    pub fn series_len(&self) -> usize {
        self.weights[0].len()
    }

    pub fn weight(&self, coord: GridCoord) -> &TimeSeries {
        &self.weights[coord.index(self.side)]
    }

    pub fn weights(&self) -> &[TimeSeries] {
        &self.weights
    }

    fn wrap_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.side - d)
    }

    /// Toroidal Chebyshev distance between two nodes.
    pub fn grid_distance(&self, a: GridCoord, b: GridCoord) -> usize {
        self.wrap_distance(a.row, b.row)
            .max(self.wrap_distance(a.col, b.col))
    }
}

/// Fills every node with samples drawn uniformly over the dataset's sample range.
pub fn initialize_mesh(dataset: &Dataset, config: &SomConfig) -> Result<SomMesh> {
    let m = dataset.series_len().ok_or(Error::EmptyDataset)?;
    let (lo, hi) = dataset.sample_range().ok_or(Error::EmptyDataset)?;
    let side = mesh_side(dataset.len(), config.mesh_mode);
    let nodes = side * side;
    let eligible = match config.mesh_mode {
        MeshMode::Auto => nodes,
        MeshMode::Fixed(k) => k,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let weights = (0..nodes)
        .map(|_| {
            let values = (0..m)
                .map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo })
                .collect();
            TimeSeries::new(values)
        })
        .collect::<Result<Vec<_>>>()?;
    SomMesh::from_weights(side, eligible, weights)
}

/// Outcome of one BMU search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmuResult {
    pub coord: GridCoord,
    /// DTW distance between the query and the BMU weights.
    pub distance: f64,
    pub dtw_calls: usize,
    pub pruned_nodes: usize,
}

/// Finds the eligible node whose weights are DTW-nearest to `q`.
///
/// `envelope` must be built from `q` with the same window. With `pruning`
/// the Euclidean/LB_Keogh cascade skips nodes that cannot win; without it
/// every node is compared by DTW. Ties go to the lowest row-major index in
/// both modes, so the returned coordinate never depends on `pruning`.
pub fn find_bmu(
    mesh: &SomMesh,
    q: &TimeSeries,
    envelope: &Envelope,
    window: &WindowSpec,
    pruning: bool,
) -> Result<BmuResult> {
    let m = mesh.series_len();
    if q.len() != m {
        return Err(Error::LengthMismatch {
            left: q.len(),
            right: m,
        });
    }
    if envelope.len() != m {
        return Err(Error::LengthMismatch {
            left: envelope.len(),
            right: m,
        });
    }
    let w = window.resolve_checked(m)?;
    if envelope.window() != w {
        return Err(Error::InvalidWindow(format!(
            "envelope was built with window {} but the search uses {w}",
            envelope.window()
        )));
    }
    Ok(search(mesh, q, envelope, w, pruning))
}

pub(crate) fn search(
    mesh: &SomMesh,
    q: &[f64],
    envelope: &Envelope,
    w: usize,
    pruning: bool,
) -> BmuResult {
    let (index, best_sq, dtw_calls) =
        nearest_prototype(&mesh.weights[..mesh.eligible], q, envelope, w, pruning);
    BmuResult {
        coord: GridCoord::from_index(index, mesh.side),
        distance: best_sq.sqrt(),
        dtw_calls,
        pruned_nodes: mesh.eligible - dtw_calls,
    }
}

/// Shared bound cascade: returns (index, squared DTW, DTW calls).
pub(crate) fn nearest_prototype(
    prototypes: &[TimeSeries],
    q: &[f64],
    envelope: &Envelope,
    w: usize,
    pruning: bool,
) -> (usize, f64, usize) {
    let threshold = if pruning {
        prototypes
            .iter()
            .map(|p| squared_euclidean(q, p))
            .fold(f64::INFINITY, f64::min)
            * (1.0 + BOUND_SLACK)
    } else {
        f64::INFINITY
    };
    let mut best = (0, f64::INFINITY);
    let mut calls = 0;
    for (i, p) in prototypes.iter().enumerate() {
        if pruning && squared_lb_keogh(envelope, p) > threshold {
            continue;
        }
        calls += 1;
        let d = squared_dtw(q, p, w);
        if d < best.1 {
            best = (i, d);
        }
    }
    (best.0, best.1, calls)
}

/// All nodes within toroidal Chebyshev distance `floor(radius)` of `center`,
/// in row-major order.
pub fn neighborhood(mesh: &SomMesh, center: GridCoord, radius: f64) -> Vec<GridCoord> {
    let reach = radius.max(0.0).floor() as usize;
    (0..mesh.node_count())
        .map(|i| GridCoord::from_index(i, mesh.side))
        .filter(|&c| mesh.grid_distance(center, c) <= reach)
        .collect()
}

/// Moves the BMU and its neighborhood toward `q` by the flat factor `rate`.
pub fn update_weights(
    mesh: &mut SomMesh,
    q: &TimeSeries,
    bmu: GridCoord,
    radius: f64,
    rate: f64,
) -> Result<()> {
    if q.len() != mesh.series_len() {
        return Err(Error::LengthMismatch {
            left: q.len(),
            right: mesh.series_len(),
        });
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidConfig(format!(
            "learning rate {rate} is outside [0, 1]"
        )));
    }
    pull_neighborhood(mesh, q, bmu, radius, rate);
    Ok(())
}

fn pull_neighborhood(mesh: &mut SomMesh, q: &[f64], bmu: GridCoord, radius: f64, rate: f64) {
    let side = mesh.side;
    for coord in neighborhood(mesh, bmu, radius) {
        let weights = mesh.weights[coord.index(side)].values_mut();
        for (t, &target) in weights.iter_mut().zip(q) {
            // same as t + rate * (target - t), but lands exactly on the
            // target at rate 1 and stays inside [t, target]
            *t = (1.0 - rate) * *t + rate * target;
        }
    }
}

/// Neighborhood radius and learning rate in effect during an epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub radius: f64,
    pub rate: f64,
}

/// Linear decay: epoch `p` (1-based) of `total` uses the initial values scaled
/// by `1 - (p - 1) / total`.
pub fn schedules(epoch: usize, total: usize, side: usize, initial_rate: f64) -> Schedule {
    let factor = 1.0 - (epoch.saturating_sub(1)) as f64 / total as f64;
    Schedule {
        radius: side as f64 / 2.0 * factor,
        rate: initial_rate * factor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub dtw_calls: usize,
    pub pruned: usize,
    #[serde(with = "seconds")]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SomRun {
    pub final_mesh: SomMesh,
    pub per_epoch: Vec<EpochStats>,
    /// BMU of every input series from the final epoch's search, in input order.
    pub bmu_per_series: Vec<GridCoord>,
    pub config: SomConfig,
}

impl SomRun {
    pub fn total_dtw_calls(&self) -> usize {
        self.per_epoch.iter().map(|e| e.dtw_calls).sum()
    }

    pub fn total_pruned(&self) -> usize {
        self.per_epoch.iter().map(|e| e.pruned).sum()
    }

    pub fn total_wall_time(&self) -> Duration {
        self.per_epoch.iter().map(|e| e.wall_time).sum()
    }

    /// Row-major node index of each series' BMU.
    pub fn node_assignments(&self) -> Vec<usize> {
        let side = self.final_mesh.side();
        self.bmu_per_series.iter().map(|c| c.index(side)).collect()
    }
}

/// Trains a mesh on the dataset for `config.epochs` epochs.
pub fn train(dataset: &Dataset, config: &SomConfig) -> Result<SomRun> {
    config.validate()?;
    let m = dataset.series_len().ok_or(Error::EmptyDataset)?;
    let w = config.window.resolve_checked(m)?;
    let mut mesh = initialize_mesh(dataset, config)?;
    let pool = crate::thread_pool(config.thread_count)?;

    let series = dataset.series();
    let envelopes: Vec<Envelope> = pool.install(|| {
        series
            .par_iter()
            .map(|s| envelope_with_window(s, w))
            .collect()
    });

    let mut per_epoch = Vec::with_capacity(config.epochs);
    let mut last_bmus = Vec::new();
    for epoch in 1..=config.epochs {
        let started = Instant::now();
        let schedule = schedules(epoch, config.epochs, mesh.side, config.initial_rate);

        let frozen = &mesh;
        let bmus: Vec<BmuResult> = pool.install(|| {
            series
                .par_iter()
                .zip(&envelopes)
                .map(|(s, env)| search(frozen, s, env, w, config.pruning_enabled))
                .collect()
        });

        for (s, bmu) in series.iter().zip(&bmus) {
            pull_neighborhood(&mut mesh, s, bmu.coord, schedule.radius, schedule.rate);
        }

        per_epoch.push(EpochStats {
            dtw_calls: bmus.iter().map(|b| b.dtw_calls).sum(),
            pruned: bmus.iter().map(|b| b.pruned_nodes).sum(),
            wall_time: started.elapsed(),
        });
        last_bmus = bmus;
    }

    Ok(SomRun {
        final_mesh: mesh,
        per_epoch,
        bmu_per_series: last_bmus.into_iter().map(|b| b.coord).collect(),
        config: config.clone(),
    })
}

/// Classification mode: a mesh of exactly `k` eligible nodes, with each
/// series labelled by the row-major index of its BMU.
pub fn classify(dataset: &Dataset, k: usize, config: &SomConfig) -> Result<Partition> {
    classify_run(dataset, k, config).map(|(partition, _)| partition)
}

/// [`classify`], also returning the training run for instrumentation.
pub fn classify_run(dataset: &Dataset, k: usize, config: &SomConfig) -> Result<(Partition, SomRun)> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    if k > dataset.len() {
        return Err(Error::TooManyClusters {
            k,
            n: dataset.len(),
        });
    }
    let config = SomConfig {
        mesh_mode: MeshMode::Fixed(k),
        ..config.clone()
    };
    let run = train(dataset, &config)?;
    let partition = Partition::new(run.node_assignments(), k)?;
    Ok((partition, run))
}

/// Groups the nodes that are BMUs in `run` into at most `k` clusters by
/// average-linkage agglomeration on the DTW distance between node weights,
/// then labels every series with the cluster of its BMU.
///
/// Merges take the closest pair of groups, the earliest pair on ties. Cluster
/// ids follow the smallest row-major node index in each group.
pub fn extract_clusters(run: &SomRun, k: usize, window: &WindowSpec) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let mesh = &run.final_mesh;
    let w = window.resolve_checked(mesh.series_len())?;
    let side = mesh.side;
    let mut used: Vec<usize> = run.bmu_per_series.iter().map(|c| c.index(side)).collect();
    used.sort_unstable();
    used.dedup();

    let u = used.len();
    let mut dist = vec![vec![0.0; u]; u];
    for a in 0..u {
        for b in a + 1..u {
            let d = squared_dtw(&mesh.weights[used[a]], &mesh.weights[used[b]], w).sqrt();
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }

    // groups[i] lists positions in `used`; a group's slot is its first member
    let mut groups: Vec<Vec<usize>> = (0..u).map(|i| vec![i]).collect();
    let mut alive: Vec<usize> = (0..u).collect();
    while alive.len() > k {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, &a) in alive.iter().enumerate() {
            for &b in &alive[i + 1..] {
                if best.is_none_or(|(d, _, _)| dist[a][b] < d) {
                    best = Some((dist[a][b], a, b));
                }
            }
        }
        let (_, a, b) = best.expect("more than k >= 1 groups leaves a pair");
        let (na, nb) = (groups[a].len() as f64, groups[b].len() as f64);
        for &c in &alive {
            if c != a && c != b {
                let d = (na * dist[a][c] + nb * dist[b][c]) / (na + nb);
                dist[a][c] = d;
                dist[c][a] = d;
            }
        }
        let moved = std::mem::take(&mut groups[b]);
        groups[a].extend(moved);
        alive.retain(|&c| c != b);
    }

    let mut cluster_of_node = vec![0; mesh.node_count()];
    for (cluster, &slot) in alive.iter().enumerate() {
        for &pos in &groups[slot] {
            cluster_of_node[used[pos]] = cluster;
        }
    }
    let assignments = run
        .bmu_per_series
        .iter()
        .map(|c| cluster_of_node[c.index(side)])
        .collect();
    Partition::new(assignments, alive.len().max(1))
}

/// Per node, the mean DTW distance to its four toroidal von Neumann neighbors.
/// Returned as `side` rows of `side` values.
pub fn u_matrix(mesh: &SomMesh, window: &WindowSpec) -> Result<Vec<Vec<f64>>> {
    let side = mesh.side;
    let w = window.resolve_checked(mesh.series_len())?;
    let grid = (0..side)
        .map(|row| {
            (0..side)
                .map(|col| {
                    let here = mesh.weight(GridCoord::new(row, col));
                    let neighbors = [
                        GridCoord::new((row + side - 1) % side, col),
                        GridCoord::new((row + 1) % side, col),
                        GridCoord::new(row, (col + side - 1) % side),
                        GridCoord::new(row, (col + 1) % side),
                    ];
                    neighbors
                        .iter()
                        .map(|&n| squared_dtw(here, mesh.weight(n), w).sqrt())
                        .sum::<f64>()
                        / 4.0
                })
                .collect()
        })
        .collect();
    Ok(grid)
}

pub(crate) mod seconds {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}

pub(crate) use self::seconds as duration_seconds;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{build_envelope, dtw};

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn uniform_mesh(side: usize, value: f64, m: usize) -> SomMesh {
        SomMesh::from_weights(side, side * side, vec![ts(&vec![value; m]); side * side]).unwrap()
    }

    #[test]
    fn mesh_side_examples() {
        assert_eq!(mesh_side(100, MeshMode::Auto), 8);
        assert_eq!(mesh_side(1, MeshMode::Auto), 3);
        // 5 * sqrt(25) = 25 nodes exactly
        assert_eq!(mesh_side(25, MeshMode::Auto), 5);
        assert_eq!(mesh_side(150, MeshMode::Auto), 8);
        assert_eq!(mesh_side(0, MeshMode::Fixed(2)), 2);
        assert_eq!(mesh_side(0, MeshMode::Fixed(1)), 1);
        assert_eq!(mesh_side(0, MeshMode::Fixed(4)), 2);
        assert_eq!(mesh_side(0, MeshMode::Fixed(5)), 3);
    }

    #[test]
    fn initialization_is_seeded_and_in_range() {
        let d = Dataset::new("d", vec![ts(&[-1.0, 2.0, 0.5]), ts(&[0.0, 1.0, 3.0])], None).unwrap();
        let cfg = SomConfig {
            seed: 7,
            ..SomConfig::default()
        };
        let a = initialize_mesh(&d, &cfg).unwrap();
        let b = initialize_mesh(&d, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.weights().iter().flat_map(|w| w.iter()).all(|&v| (-1.0..=3.0).contains(&v)));
        let other = initialize_mesh(&d, &SomConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn constant_dataset_initializes_constant_weights() {
        let d = Dataset::new("c", vec![ts(&[2.5; 4]); 3], None).unwrap();
        let mesh = initialize_mesh(&d, &SomConfig::default()).unwrap();
        assert!(mesh.weights().iter().all(|w| w.values() == [2.5; 4]));
    }

    #[test]
    fn single_node_mesh_is_always_bmu() {
        let mesh = SomMesh::from_weights(1, 1, vec![ts(&[1.0, 2.0, 3.0])]).unwrap();
        let q = ts(&[0.0, 0.0, 1.0]);
        let w = WindowSpec::Absolute(1);
        let env = build_envelope(&q, &w).unwrap();
        for pruning in [true, false] {
            let r = find_bmu(&mesh, &q, &env, &w, pruning).unwrap();
            assert_eq!(r.coord, GridCoord::new(0, 0));
            assert_eq!((r.dtw_calls, r.pruned_nodes), (1, 0));
        }
    }

    #[test]
    fn exact_match_wins_with_zero_distance() {
        let q = ts(&[0.0, 1.0, 0.0, -1.0]);
        let mut weights = vec![ts(&[3.0; 4]); 9];
        weights[5] = q.clone();
        let mesh = SomMesh::from_weights(3, 9, weights).unwrap();
        let w = WindowSpec::Absolute(1);
        let env = build_envelope(&q, &w).unwrap();
        let r = find_bmu(&mesh, &q, &env, &w, true).unwrap();
        assert_eq!(r.coord, GridCoord::new(1, 2));
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.dtw_calls + r.pruned_nodes, 9);
        assert_eq!(r.dtw_calls, 1);
    }

    #[test]
    fn ties_go_to_lowest_row_major_index() {
        let mesh = uniform_mesh(3, 1.0, 4);
        let q = ts(&[0.0; 4]);
        let w = WindowSpec::Absolute(2);
        let env = build_envelope(&q, &w).unwrap();
        for pruning in [true, false] {
            let r = find_bmu(&mesh, &q, &env, &w, pruning).unwrap();
            assert_eq!(r.coord, GridCoord::new(0, 0));
        }
    }

    #[test]
    fn find_bmu_rejects_mismatched_inputs() {
        let mesh = uniform_mesh(2, 0.0, 4);
        let q = ts(&[0.0; 3]);
        let w = WindowSpec::Absolute(1);
        let env = build_envelope(&q, &w).unwrap();
        assert!(find_bmu(&mesh, &q, &env, &w, true).is_err());
        let q4 = ts(&[0.0; 4]);
        let env0 = build_envelope(&q4, &WindowSpec::Absolute(0)).unwrap();
        assert!(matches!(
            find_bmu(&mesh, &q4, &env0, &w, true),
            Err(Error::InvalidWindow(_))
        ));
    }

    #[test]
    fn fixed_mesh_only_searches_eligible_nodes() {
        let q = ts(&[5.0, 5.0]);
        let mut weights = vec![ts(&[0.0, 0.0]); 4];
        weights[3] = q.clone();
        let mesh = SomMesh::from_weights(2, 3, weights).unwrap();
        let w = WindowSpec::Absolute(0);
        let env = build_envelope(&q, &w).unwrap();
        let r = find_bmu(&mesh, &q, &env, &w, false).unwrap();
        assert!(r.coord.index(2) < 3);
        assert_eq!(r.dtw_calls + r.pruned_nodes, 3);
    }

    #[test]
    fn neighborhood_examples() {
        let mesh = uniform_mesh(5, 0.0, 1);
        let c = GridCoord::new(0, 0);
        assert_eq!(neighborhood(&mesh, c, 0.0), vec![c]);
        assert_eq!(neighborhood(&mesh, c, 0.99), vec![c]);
        let ball = neighborhood(&mesh, c, 1.0);
        assert_eq!(ball.len(), 9);
        for expected in [(4, 4), (4, 0), (4, 1), (0, 4), (0, 1), (1, 4), (1, 0), (1, 1)] {
            assert!(ball.contains(&GridCoord::new(expected.0, expected.1)));
        }
        assert_eq!(neighborhood(&mesh, GridCoord::new(2, 3), 2.5).len(), 25);
        let even = uniform_mesh(4, 0.0, 1);
        assert_eq!(neighborhood(&even, GridCoord::new(1, 1), 2.0).len(), 16);
        assert_eq!(neighborhood(&even, GridCoord::new(1, 1), 1.0).len(), 9);
    }

    #[test]
    fn update_examples() {
        let q = ts(&[2.0, 4.0]);
        let mut mesh = uniform_mesh(3, 0.0, 2);
        let before = mesh.clone();
        update_weights(&mut mesh, &q, GridCoord::new(1, 1), 1.0, 0.0).unwrap();
        assert_eq!(mesh, before);

        update_weights(&mut mesh, &q, GridCoord::new(0, 0), 0.0, 0.5).unwrap();
        assert_eq!(mesh.weight(GridCoord::new(0, 0)).values(), &[1.0, 2.0]);
        assert_eq!(mesh.weight(GridCoord::new(0, 1)).values(), &[0.0, 0.0]);

        let odd = ts(&[0.1, 0.7]);
        let mut full = uniform_mesh(3, 0.3, 2);
        update_weights(&mut full, &odd, GridCoord::new(2, 2), 1.0, 1.0).unwrap();
        for coord in neighborhood(&full, GridCoord::new(2, 2), 1.0) {
            assert_eq!(full.weight(coord), &odd);
        }
        assert!(update_weights(&mut full, &odd, GridCoord::new(0, 0), 1.0, 1.5).is_err());
    }

    #[test]
    fn schedule_examples() {
        let s = schedules(1, 10, 8, 0.9);
        assert_eq!((s.radius, s.rate), (4.0, 0.9));
        let s6 = schedules(6, 10, 8, 0.9);
        assert!((s6.rate - 0.45).abs() < 1e-15);
        assert!((s6.radius - 2.0).abs() < 1e-15);
        let last = schedules(10, 10, 8, 0.9);
        assert!((last.rate - 0.09).abs() < 1e-15);
        assert!(last.rate > 0.0 && last.radius > 0.0);
        let mut prev = schedules(1, 25, 6, 0.9);
        for p in 2..=25 {
            let s = schedules(p, 25, 6, 0.9);
            assert!(s.rate < prev.rate && s.radius < prev.radius);
            assert!(s.rate > 0.0 && s.radius > 0.0);
            prev = s;
        }
    }

    #[test]
    fn identical_series_collapse_onto_one_attractor() {
        let s = ts(&[0.0, 1.0, 0.5, -0.5, 0.0]);
        let d = Dataset::new("same", vec![s.clone(); 6], None).unwrap();
        let cfg = SomConfig {
            epochs: 5,
            window: WindowSpec::Absolute(1),
            ..SomConfig::default()
        };
        let run = train(&d, &cfg).unwrap();
        assert!(run.bmu_per_series.windows(2).all(|p| p[0] == p[1]));
        let bmu = run.bmu_per_series[0];
        let dist = dtw(run.final_mesh.weight(bmu), &s, &cfg.window).unwrap();
        assert!(dist < 1e-6, "BMU weights should converge to the series, got {dist}");
    }

    #[test]
    fn train_records_instrumentation() {
        let d = Dataset::new(
            "d",
            (0..12)
                .map(|i| ts(&[(i % 3) as f64, 1.0, (i % 2) as f64, 0.0]))
                .collect(),
            None,
        )
        .unwrap();
        let cfg = SomConfig {
            epochs: 4,
            window: WindowSpec::Absolute(1),
            ..SomConfig::default()
        };
        let run = train(&d, &cfg).unwrap();
        let nodes = run.final_mesh.node_count();
        assert_eq!(run.per_epoch.len(), 4);
        assert_eq!(run.bmu_per_series.len(), 12);
        for e in &run.per_epoch {
            assert_eq!(e.dtw_calls + e.pruned, 12 * nodes);
        }
    }

    #[test]
    fn classify_edge_cases() {
        let d = Dataset::new(
            "d",
            vec![ts(&[0.0, 0.0]), ts(&[1.0, 1.0]), ts(&[5.0, 5.0])],
            None,
        )
        .unwrap();
        let cfg = SomConfig {
            epochs: 3,
            window: WindowSpec::Absolute(0),
            ..SomConfig::default()
        };
        let one = classify(&d, 1, &cfg).unwrap();
        assert_eq!(one.assignments(), &[0, 0, 0]);
        let all = classify(&d, 3, &cfg).unwrap();
        assert!(all.occupied() <= 3);
        assert_eq!(all, classify(&d, 3, &cfg).unwrap());
        assert!(matches!(
            classify(&d, 4, &cfg),
            Err(Error::TooManyClusters { k: 4, n: 3 })
        ));
    }

    #[test]
    fn u_matrix_examples() {
        let flat = uniform_mesh(3, 0.7, 5);
        let u = u_matrix(&flat, &WindowSpec::Absolute(2)).unwrap();
        assert_eq!((u.len(), u[0].len()), (3, 3));
        assert!(u.iter().flatten().all(|&v| v == 0.0));

        // columns hold [0] and [1]: each node has two equal vertical
        // neighbours (distance 0) and two horizontal ones at distance 1
        let cols = SomMesh::from_weights(2, 4, vec![ts(&[0.0]), ts(&[1.0]), ts(&[0.0]), ts(&[1.0])])
            .unwrap();
        let u = u_matrix(&cols, &WindowSpec::Fraction(0.1)).unwrap();
        assert_eq!(u, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn config_validation() {
        let ok = SomConfig::default();
        assert!(ok.validate().is_ok());
        assert!(SomConfig { epochs: 0, ..ok.clone() }.validate().is_err());
        assert!(SomConfig { initial_rate: 0.0, ..ok.clone() }.validate().is_err());
        assert!(SomConfig { initial_rate: 1.2, ..ok.clone() }.validate().is_err());
        assert!(SomConfig { mesh_mode: MeshMode::Fixed(0), ..ok }.validate().is_err());
    }

    #[test]
    fn extract_clusters_merges_nearby_nodes() {
        let mesh = SomMesh::from_weights(
            3,
            9,
            vec![
                ts(&[0.0, 0.0]),
                ts(&[0.1, 0.1]),
                ts(&[50.0, 50.0]),
                ts(&[5.0, 5.0]),
                ts(&[5.2, 5.2]),
                ts(&[0.2, 0.0]),
                ts(&[9.0, 9.0]),
                ts(&[9.0, 9.0]),
                ts(&[9.0, 9.0]),
            ],
        )
        .unwrap();
        // node 2 is far from everything but nobody maps to it
        let bmus = [0, 4, 1, 3, 5, 4].map(|i| GridCoord::from_index(i, 3)).to_vec();
        let run = SomRun {
            final_mesh: mesh,
            per_epoch: Vec::new(),
            bmu_per_series: bmus,
            config: SomConfig::default(),
        };
        let w = WindowSpec::Absolute(0);
        let p = extract_clusters(&run, 2, &w).unwrap();
        assert_eq!(p.assignments(), &[0, 1, 0, 1, 0, 1]);
        let p = extract_clusters(&run, 1, &w).unwrap();
        assert!(p.assignments().iter().all(|&a| a == 0));
        // more groups than used nodes leaves every used node on its own
        let p = extract_clusters(&run, 10, &w).unwrap();
        assert_eq!(p.assignments(), &[0, 3, 1, 2, 4, 3]);
        assert!(extract_clusters(&run, 0, &w).is_err());
    }
}
