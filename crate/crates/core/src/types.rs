//! Shared value types: series, datasets, partitions and mesh coordinates.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, non-empty sequence of real samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Mutable access for in-crate updates that keep every sample finite.
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Deref for TimeSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<TimeSeries> for Vec<f64> {
    fn from(series: TimeSeries) -> Self {
        series.0
    }
}

/// Equal-length series with optional integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    series: Vec<TimeSeries>,
    labels: Option<Vec<i64>>,
}

impl Dataset {
    /// Builds a dataset, rejecting mixed series lengths and mismatched label counts.
    ///
    /// An empty series list is accepted; the engines reject it at their own
    /// entry points.
    pub fn new(
        name: impl Into<String>,
        series: Vec<TimeSeries>,
        labels: Option<Vec<i64>>,
    ) -> Result<Self> {
        if let Some(first) = series.first() {
            let m = first.len();
            if let Some(bad) = series.iter().find(|s| s.len() != m) {
                return Err(Error::LengthMismatch {
                    left: m,
                    right: bad.len(),
                });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != series.len() {
                return Err(Error::LabelCount {
                    labels: labels.len(),
                    series: series.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            series,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Common series length, or `None` for an empty dataset.
    pub fn series_len(&self) -> Option<usize> {
        self.series.first().map(|s| s.len())
    }

    /// Number of distinct labels, if labels are present.
    pub fn class_count(&self) -> Option<usize> {
        self.labels.as_ref().map(|labels| {
            let mut distinct = labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            distinct.len()
        })
    }

    /// Smallest and largest sample over every series.
    pub fn sample_range(&self) -> Option<(f64, f64)> {
        let mut samples = self.series.iter().flat_map(|s| s.iter().copied());
        let first = samples.next()?;
        Some(samples.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Appends the series of `other`. Labels survive only when both sides carry them.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        let mut series = self.series.clone();
        series.extend(other.series.iter().cloned());
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Dataset::new(self.name.clone(), series, labels)
    }

    /// Applies `f` to every series, keeping name and labels.
    pub fn map_series<F>(&self, f: F) -> Result<Dataset>
    where
        F: Fn(&TimeSeries) -> Result<TimeSeries>,
    {
        let series = self.series.iter().map(f).collect::<Result<Vec<_>>>()?;
        Dataset::new(self.name.clone(), series, self.labels.clone())
    }

    /// Ground-truth labels as a dense partition.
    pub fn label_partition(&self) -> Option<Partition> {
        self.labels.as_deref().map(Partition::from_labels)
    }
}

/// Sum of series lengths, the scaling variable for DTW clustering cost.
pub fn problem_size(dataset: &Dataset) -> usize {
    dataset.series.iter().map(|s| s.len()).sum()
}

/// One cluster id per item, every id in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignments: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignments: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartition("k must be at least 1".into()));
        }
        if let Some((i, &a)) = assignments.iter().enumerate().find(|(_, &a)| a >= k) {
            return Err(Error::InvalidPartition(format!(
                "assignment {a} of item {i} is outside 0..{k}"
            )));
        }
        Ok(Self { assignments, k })
    }

    /// Relabels arbitrary labels to dense ids in order of first appearance.
    pub fn from_labels<L: Hash + Eq + Copy>(labels: &[L]) -> Self {
        let mut ids = HashMap::new();
        let assignments = labels
            .iter()
            .map(|label| {
                let next = ids.len();
                *ids.entry(*label).or_insert(next)
            })
            .collect();
        Self {
            assignments,
            k: ids.len().max(1),
        }
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Number of ids that are actually used.
    pub fn occupied(&self) -> usize {
        let mut used = vec![false; self.k];
        for &a in &self.assignments {
            used[a] = true;
        }
        used.into_iter().filter(|&u| u).count()
    }
}

/// Address of a node in a square mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCoord {
    pub row: usize,
    pub col: usize,
}

impl GridCoord {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn from_index(index: usize, side: usize) -> Self {
        Self {
            row: index / side,
            col: index % side,
        }
    }

    /// Row-major index within a mesh of the given side.
    pub fn index(self, side: usize) -> usize {
        self.row * side + self.col
    }
}
