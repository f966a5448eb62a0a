//! Harness around the `tswarp` engines: single runs with pruning
//! instrumentation, directory benchmarks with summary tables, and U-matrix
//! export. The `tswarp` binary is a thin command-line layer over this crate.

pub mod bench;
pub mod report;
pub mod run;

pub use bench::{discover, load_all, run_bench, umatrix, UmatrixOptions};
pub use report::{assignments_csv, summary_csv, umatrix_csv, weights_csv, IterationRecord, RunReport};
pub use run::{run, Algorithm, AssignmentRow, MeshChoice, RunOptions, RunOutcome};
