//! Time-series clustering under dynamic time warping with exact distance pruning.
//!
//! Both clustering engines ([`som`] and [`kmeans`]) search for the nearest
//! prototype with the same bound cascade: the Euclidean distance to every
//! prototype gives an upper bound, the smallest of those becomes the pruning
//! threshold, and only prototypes whose LB_Keogh lower bound does not exceed
//! the threshold are handed to the full DTW kernel. The result is identical to
//! an exhaustive DTW search.
//!
//! Supporting modules cover dataset ingestion and preprocessing ([`ingest`])
//! and external clustering-quality indices ([`metrics`]).

pub mod distance;
pub mod error;
pub mod ingest;
pub mod kmeans;
pub mod metrics;
pub mod som;
pub mod types;

pub use distance::{
    build_envelope, dtw, dtw_oracle, euclidean, lb_keogh, resolve_window, Envelope, WindowSpec,
};
pub use error::{Error, Result};
pub use kmeans::{kmeans_cluster, KmeansConfig, KmeansRun};
pub use som::{classify, extract_clusters, train, MeshMode, SomConfig, SomMesh, SomRun};
pub use types::{problem_size, Dataset, GridCoord, Partition, TimeSeries};

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))
}
