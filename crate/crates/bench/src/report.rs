//! Run reports and their JSON/CSV renderings.
//!
//! Everything here except the timing fields is a pure function of the inputs
//! and seeds, so reruns produce byte-identical assignment files and summaries
//! (timing columns are opt-in).

use std::time::Duration;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use tswarp::som::SomMesh;

use crate::run::{Algorithm, AssignmentRow, MeshChoice, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub dtw_calls: usize,
    pub pruned: usize,
    pub time_seconds: f64,
}

impl IterationRecord {
    pub fn new(dtw_calls: usize, pruned: usize, time: Duration) -> Self {
        Self {
            dtw_calls,
            pruned,
            time_seconds: time.as_secs_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub problem_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_frac: Option<f64>,
    /// Resolved warping window in timesteps.
    pub window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh_side: Option<usize>,
    pub seed: u64,
    pub pruning: bool,
    pub threads: usize,
    pub z_normalize: bool,
    pub dtw_calls: usize,
    pub pruned: usize,
    pub pruning_percent: f64,
    pub wall_time_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unpruned_wall_time_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unpruned_dtw_calls: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup_vs_unpruned: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unpruned_assignments_match: Option<bool>,
    pub ari: Option<f64>,
    pub ami: Option<f64>,
    pub ri: Option<f64>,
    pub homogeneity: Option<f64>,
    pub completeness: Option<f64>,
    pub fms: Option<f64>,
    pub per_iteration: Vec<IterationRecord>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{}", e.error()))?;
    Ok(String::from_utf8(bytes)?)
}

/// `index,label,cluster`, plus `bmu_row,bmu_col` for SOM runs. Unlabelled
/// series leave the label empty.
pub fn assignments_csv(rows: &[AssignmentRow]) -> Result<String> {
    let with_bmu = rows.iter().any(|r| r.bmu.is_some());
    csv_string(|w| {
        let mut header = vec!["index", "label", "cluster"];
        if with_bmu {
            header.extend(["bmu_row", "bmu_col"]);
        }
        w.write_record(&header)?;
        for r in rows {
            let mut record = vec![
                r.index.to_string(),
                r.label.map(|l| l.to_string()).unwrap_or_default(),
                r.cluster.to_string(),
            ];
            if let Some(c) = r.bmu {
                record.extend([c.row.to_string(), c.col.to_string()]);
            }
            w.write_record(&record)?;
        }
        Ok(())
    })
}

const METRIC_COLUMNS: [&str; 6] = ["ari", "ami", "ri", "homogeneity", "completeness", "fms"];
const TIMING_COLUMNS: [&str; 3] = [
    "wall_time_seconds",
    "unpruned_wall_time_seconds",
    "speedup_vs_unpruned",
];

fn metrics_of(r: &RunReport) -> [Option<f64>; 6] {
    [r.ari, r.ami, r.ri, r.homogeneity, r.completeness, r.fms]
}

fn fixed(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let values: Vec<f64> = values.collect::<Option<Vec<f64>>>()?;
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Summary table: one row per run, then an `AVERAGE` row per algorithm (in
/// order of first appearance). Metrics are multiplied by 100. Averages of a
/// metric are left empty when any run of that algorithm lacks labels.
pub fn summary_csv(outcomes: &[RunOutcome], with_timing: bool) -> Result<String> {
    let mut algorithms: Vec<Algorithm> = Vec::new();
    for o in outcomes {
        if !algorithms.contains(&o.report.algorithm) {
            algorithms.push(o.report.algorithm);
        }
    }
    csv_string(|w| {
        let mut header = vec![
            "dataset",
            "algorithm",
            "n",
            "m",
            "k",
            "problem_size",
            "dtw_calls",
            "pruned",
            "pruning_percent",
        ];
        header.extend(METRIC_COLUMNS);
        if with_timing {
            header.extend(TIMING_COLUMNS);
        }
        w.write_record(&header)?;

        for o in outcomes {
            let r = &o.report;
            let mut record = vec![
                r.dataset.clone(),
                r.algorithm.to_string(),
                r.n.to_string(),
                r.m.to_string(),
                r.k.to_string(),
                r.problem_size.to_string(),
                r.dtw_calls.to_string(),
                r.pruned.to_string(),
                format!("{:.4}", r.pruning_percent),
            ];
            record.extend(metrics_of(r).map(|v| fixed(v.map(|v| v * 100.0))));
            if with_timing {
                record.extend([
                    format!("{:.6}", r.wall_time_seconds),
                    r.unpruned_wall_time_seconds.map(|v| format!("{v:.6}")).unwrap_or_default(),
                    r.speedup_vs_unpruned.map(|v| format!("{v:.4}")).unwrap_or_default(),
                ]);
            }
            w.write_record(&record)?;
        }

        for alg in &algorithms {
            let runs: Vec<&RunReport> = outcomes
                .iter()
                .map(|o| &o.report)
                .filter(|r| r.algorithm == *alg)
                .collect();
            let avg = |f: &dyn Fn(&RunReport) -> Option<f64>| mean(runs.iter().map(|r| f(r)));
            let mut record = vec![
                "AVERAGE".to_string(),
                alg.to_string(),
                String::new(),
                String::new(),
                String::new(),
                fixed(avg(&|r| Some(r.problem_size as f64))),
                fixed(avg(&|r| Some(r.dtw_calls as f64))),
                fixed(avg(&|r| Some(r.pruned as f64))),
                fixed(avg(&|r| Some(r.pruning_percent))),
            ];
            for i in 0..METRIC_COLUMNS.len() {
                record.push(fixed(avg(&|r| metrics_of(r)[i].map(|v| v * 100.0))));
            }
            if with_timing {
                record.extend([
                    avg(&|r| Some(r.wall_time_seconds)).map(|v| format!("{v:.6}")).unwrap_or_default(),
                    avg(&|r| r.unpruned_wall_time_seconds).map(|v| format!("{v:.6}")).unwrap_or_default(),
                    fixed(avg(&|r| r.speedup_vs_unpruned)),
                ]);
            }
            w.write_record(&record)?;
        }
        Ok(())
    })
}

/// U-matrix as `row,col,value`, row-major.
pub fn umatrix_csv(grid: &[Vec<f64>]) -> Result<String> {
    csv_string(|w| {
        w.write_record(["row", "col", "value"])?;
        for (row, values) in grid.iter().enumerate() {
            for (col, v) in values.iter().enumerate() {
                w.write_record([row.to_string(), col.to_string(), v.to_string()])?;
            }
        }
        Ok(())
    })
}

/// Node weights as `row,col,w0,..,w{m-1}`, one node per line, row-major.
pub fn weights_csv(mesh: &SomMesh) -> Result<String> {
    let side = mesh.side();
    csv_string(|w| {
        let mut header = vec!["row".to_string(), "col".to_string()];
        header.extend((0..mesh.series_len()).map(|j| format!("w{j}")));
        w.write_record(&header)?;
        for (i, weights) in mesh.weights().iter().enumerate() {
            let mut record = vec![(i / side).to_string(), (i % side).to_string()];
            record.extend(weights.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        Ok(())
    })
}
