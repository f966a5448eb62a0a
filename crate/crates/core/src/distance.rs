//! Euclidean upper bound, LB_Keogh lower bound and windowed DTW.
//!
//! All three share one cost unit: the square root of a sum of squared
//! pointwise differences. Under that convention, for any window `W`,
//!
//! ```text
//! lb_keogh(envelope(q, W), c) <= dtw(q, c, W) <= euclidean(q, c)
//! ```
//!
//! which is the ordering the pruning cascade in the clustering engines relies on.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::TimeSeries;

/// Longest series accepted by [`dtw_oracle`].
pub const ORACLE_MAX_LEN: usize = 10;

/// Sakoe-Chiba window, either in timesteps or as a fraction of the series length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum WindowSpec {
    Absolute(usize),
    Fraction(f64),
}

impl WindowSpec {
    pub fn fraction(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidWindow(format!(
                "fraction {value} is outside [0, 1]"
            )));
        }
        Ok(WindowSpec::Fraction(value))
    }

    pub fn absolute(steps: usize) -> Self {
        WindowSpec::Absolute(steps)
    }

    /// Resolves and checks the window against a series length.
    pub fn resolve_checked(&self, m: usize) -> Result<usize> {
        if let WindowSpec::Fraction(f) = *self {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidWindow(format!(
                    "fraction {f} is outside [0, 1]"
                )));
            }
        }
        let w = resolve_window(self, m);
        if m > 0 && w > m - 1 {
            return Err(Error::InvalidWindow(format!(
                "window {w} exceeds series length {m} minus one"
            )));
        }
        Ok(w)
    }
}

/// Absolute window in timesteps for series of length `m`.
///
/// Fractions round up and are clamped to `m - 1`. The product is nudged down by
/// a tiny epsilon first so that values like `0.1 * 30` do not round up past
/// their exact decimal result.
pub fn resolve_window(window: &WindowSpec, m: usize) -> usize {
    match *window {
        WindowSpec::Absolute(w) => w,
        WindowSpec::Fraction(f) => {
            let raw = (f * m as f64 - 1e-9).ceil().max(0.0) as usize;
            raw.min(m.saturating_sub(1))
        }
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Euclidean distance between equal-length series.
pub fn euclidean(q: &TimeSeries, c: &TimeSeries) -> Result<f64> {
    check_lengths(q.len(), c.len())?;
    Ok(squared_euclidean(q, c).sqrt())
}

pub(crate) fn squared_euclidean(q: &[f64], c: &[f64]) -> f64 {
    q.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Running upper/lower bands around a query series.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    upper: Vec<f64>,
    lower: Vec<f64>,
    window: usize,
}

impl Envelope {
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }
}

/// Builds the envelope `U_i = max(q[a..=b])`, `L_i = min(q[a..=b])` with
/// `a = max(0, i - W)` and `b = min(m - 1, i + W)`.
pub fn build_envelope(q: &TimeSeries, window: &WindowSpec) -> Result<Envelope> {
    let w = window.resolve_checked(q.len())?;
    Ok(envelope_with_window(q, w))
}

/// Sliding-window extrema with monotone deques, O(m) regardless of `w`.
pub(crate) fn envelope_with_window(q: &[f64], w: usize) -> Envelope {
    let m = q.len();
    let mut upper = Vec::with_capacity(m);
    let mut lower = Vec::with_capacity(m);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..m {
        let hi = (i + w).min(m - 1);
        while next <= hi {
            while maxq.back().is_some_and(|&j| q[j] <= q[next]) {
                maxq.pop_back();
            }
            maxq.push_back(next);
            while minq.back().is_some_and(|&j| q[j] >= q[next]) {
                minq.pop_back();
            }
            minq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(w);
        while maxq.front().is_some_and(|&j| j < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < lo) {
            minq.pop_front();
        }
        upper.push(q[maxq[0]]);
        lower.push(q[minq[0]]);
    }
    Envelope {
        upper,
        lower,
        window: w,
    }
}

/// LB_Keogh lower bound of the envelope's query against candidate `c`.
///
/// Not symmetric: swapping query and candidate generally changes the value.
pub fn lb_keogh(envelope: &Envelope, c: &TimeSeries) -> Result<f64> {
    check_lengths(envelope.len(), c.len())?;
    Ok(squared_lb_keogh(envelope, c).sqrt())
}

pub(crate) fn squared_lb_keogh(envelope: &Envelope, c: &[f64]) -> f64 {
    let mut sum = 0.0;
    for ((&t, &u), &l) in c.iter().zip(&envelope.upper).zip(&envelope.lower) {
        if t > u {
            sum += (t - u) * (t - u);
        } else if t < l {
            sum += (t - l) * (t - l);
        }
    }
    sum
}

/// DTW distance restricted to the band `|i - j| <= W`.
pub fn dtw(q: &TimeSeries, c: &TimeSeries, window: &WindowSpec) -> Result<f64> {
    check_lengths(q.len(), c.len())?;
    let w = window.resolve_checked(q.len())?;
    Ok(squared_dtw(q, c, w).sqrt())
}

/// Banded DTW over squared pointwise costs, returned before the square root.
///
/// Uses two rolling rows; cells outside the band stay at +inf.
pub(crate) fn squared_dtw(q: &[f64], c: &[f64], w: usize) -> f64 {
    let m = q.len();
    debug_assert_eq!(m, c.len());
    let mut prev = vec![f64::INFINITY; m];
    let mut curr = vec![f64::INFINITY; m];

    let hi0 = w.min(m - 1);
    let mut acc = 0.0;
    for j in 0..=hi0 {
        let d = q[0] - c[j];
        acc += d * d;
        prev[j] = acc;
    }

    for (i, &qi) in q.iter().enumerate().skip(1) {
        let lo = i.saturating_sub(w);
        let hi = (i + w).min(m - 1);
        let mut left = f64::INFINITY;
        for j in lo..=hi {
            let up = prev[j];
            let diag = if j > 0 { prev[j - 1] } else { f64::INFINITY };
            let best = up.min(diag).min(left);
            let d = qi - c[j];
            let cell = d * d + best;
            curr[j] = cell;
            left = cell;
        }
        // Row i + 1 only reads columns i + 1 - W - 1 ..= i + 1 + W of this row;
        // the rightmost one was never written and still holds +inf.
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m - 1]
}

/// Exhaustive DTW: enumerates every boundary-anchored, monotone, continuous
/// warping path inside the band and returns the smallest cost.
///
/// Exponential in the series length; only accepts series up to
/// [`ORACLE_MAX_LEN`] samples. Intended as a reference for testing.
pub fn dtw_oracle(q: &TimeSeries, c: &TimeSeries, window: &WindowSpec) -> Result<f64> {
    check_lengths(q.len(), c.len())?;
    if q.len() > ORACLE_MAX_LEN {
        return Err(Error::SeriesTooLong {
            length: q.len(),
            max: ORACLE_MAX_LEN,
        });
    }
    let w = window.resolve_checked(q.len())?;
    let mut best = f64::INFINITY;
    let mut path = vec![(0usize, 0usize)];
    enumerate_paths(q, c, w, &mut path, &mut best);
    Ok(best.sqrt())
}

fn enumerate_paths(
    q: &[f64],
    c: &[f64],
    w: usize,
    path: &mut Vec<(usize, usize)>,
    best: &mut f64,
) {
    let m = q.len();
    let &(i, j) = path.last().expect("path starts non-empty");
    if i == m - 1 && j == m - 1 {
        let cost: f64 = path
            .iter()
            .map(|&(a, b)| (q[a] - c[b]) * (q[a] - c[b]))
            .sum();
        if cost < *best {
            *best = cost;
        }
        return;
    }
    for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
        let (ni, nj) = (i + di, j + dj);
        if ni < m && nj < m && ni.abs_diff(nj) <= w {
            path.push((ni, nj));
            enumerate_paths(q, c, w, path, best);
            path.pop();
        }
    }
}
