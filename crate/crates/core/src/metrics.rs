//! External clustering-quality indices computed from a contingency table.
//!
//! Pair-counting indices (RI, ARI, FMS) are evaluated with exact integer pair
//! counts and a single final division. Information-theoretic indices use
//! natural logarithms; the expected mutual information behind AMI is the exact
//! hypergeometric sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Partition;

/// `k_pred x k_true` co-occurrence counts of two partitions of the same items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(pred: &Partition, truth: &Partition) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        if pred.len() < 2 {
            return Err(Error::TooFewItems(pred.len()));
        }
        let mut counts = vec![vec![0u64; truth.k()]; pred.k()];
        for (&p, &t) in pred.assignments().iter().zip(truth.assignments()) {
            counts[p][t] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..truth.k())
            .map(|j| counts.iter().map(|r| r[j]).sum())
            .collect();
        Ok(Self {
            counts,
            row_sums,
            col_sums,
            total: pred.len() as u64,
        })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Item-pair counts: (same in both, same only in pred, same only in truth, total pairs).
    pub fn pair_counts(&self) -> PairCounts {
        let same_both: u64 = self.counts.iter().flatten().map(|&c| comb2(c)).sum();
        let same_pred: u64 = self.row_sums.iter().map(|&c| comb2(c)).sum();
        let same_truth: u64 = self.col_sums.iter().map(|&c| comb2(c)).sum();
        let pairs = comb2(self.total);
        PairCounts {
            tp: same_both,
            fp: same_pred - same_both,
            fn_: same_truth - same_both,
            tn: pairs + same_both - same_pred - same_truth,
        }
    }
}

/// Agreement counts over all unordered item pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    /// Together in both partitions.
    pub tp: u64,
    /// Together in the prediction only.
    pub fp: u64,
    /// Together in the ground truth only.
    pub fn_: u64,
    /// Apart in both.
    pub tn: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn rand_index(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn adjusted_rand_index(&self) -> f64 {
        let (tp, fp, fn_, tn) = (
            self.tp as i128,
            self.fp as i128,
            self.fn_ as i128,
            self.tn as i128,
        );
        let numerator = 2 * (tp * tn - fn_ * fp);
        let denominator = (tp + fn_) * (fn_ + tn) + (tp + fp) * (fp + tn);
        if denominator == 0 {
            return 1.0;
        }
        numerator as f64 / denominator as f64
    }

    pub fn fowlkes_mallows(&self) -> f64 {
        if self.tp == 0 {
            return 0.0;
        }
        let product = ((self.tp + self.fp) as u128 * (self.tp + self.fn_) as u128) as f64;
        self.tp as f64 / product.sqrt()
    }
}

fn comb2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

pub fn rand_index(pred: &Partition, truth: &Partition) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?.pair_counts().rand_index())
}

pub fn adjusted_rand_index(pred: &Partition, truth: &Partition) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?
        .pair_counts()
        .adjusted_rand_index())
}

pub fn fowlkes_mallows(pred: &Partition, truth: &Partition) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?
        .pair_counts()
        .fowlkes_mallows())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoScores {
    pub ami: f64,
    pub homogeneity: f64,
    pub completeness: f64,
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.total as f64;
    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            let outer = table.row_sums[i] as f64 * table.col_sums[j] as f64;
            mi += c / n * (c * n / outer).ln();
        }
    }
    mi.max(0.0)
}

/// `H(A | B)` where rows of the table are `B` when `rows_given` is true.
fn conditional_entropy(table: &ContingencyTable, rows_given: bool) -> f64 {
    let n = table.total as f64;
    let mut h = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let given = if rows_given {
                table.row_sums[i]
            } else {
                table.col_sums[j]
            };
            let c = c as f64;
            h -= c / n * (c / given as f64).ln();
        }
    }
    h.max(0.0)
}

/// Exact expected mutual information of two random partitions with the
/// table's marginals (hypergeometric model).
pub fn expected_mutual_information(table: &ContingencyTable) -> f64 {
    let n = table.total as usize;
    let nf = n as f64;
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let mut emi = 0.0;
    for &a in table.row_sums.iter().filter(|&&a| a > 0) {
        let a = a as usize;
        for &b in table.col_sums.iter().filter(|&&b| b > 0) {
            let b = b as usize;
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = ln_fact[a] + ln_fact[b] + ln_fact[n - a] + ln_fact[n - b] - ln_fact[n];
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (a as f64 * b as f64)).ln();
                let log_prob = fixed
                    - ln_fact[nij]
                    - ln_fact[a - nij]
                    - ln_fact[b - nij]
                    - ln_fact[n + nij - a - b];
                emi += term * log_prob.exp();
            }
        }
    }
    emi
}

/// AMI (arithmetic-mean normalizer), homogeneity and completeness.
pub fn mutual_info_scores(pred: &Partition, truth: &Partition) -> Result<MutualInfoScores> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(mutual_info_from_table(&table))
}

fn mutual_info_from_table(table: &ContingencyTable) -> MutualInfoScores {
    let n = table.total as f64;
    let h_pred = entropy(&table.row_sums, n);
    let h_truth = entropy(&table.col_sums, n);

    let homogeneity = if h_truth == 0.0 {
        1.0
    } else {
        (1.0 - conditional_entropy(table, true) / h_truth).clamp(0.0, 1.0)
    };
    let completeness = if h_pred == 0.0 {
        1.0
    } else {
        (1.0 - conditional_entropy(table, false) / h_pred).clamp(0.0, 1.0)
    };

    let ami = if h_pred == 0.0 && h_truth == 0.0 {
        1.0
    } else {
        let mi = mutual_information(table);
        let emi = expected_mutual_information(table);
        let mut denominator = 0.5 * (h_pred + h_truth) - emi;
        // keep the sign but avoid dividing by a vanishing denominator
        if denominator < 0.0 {
            denominator = denominator.min(-f64::EPSILON);
        } else {
            denominator = denominator.max(f64::EPSILON);
        }
        ((mi - emi) / denominator).min(1.0)
    };

    MutualInfoScores {
        ami,
        homogeneity,
        completeness,
    }
}

/// All six indices for one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub ari: f64,
    pub ami: f64,
    pub ri: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub fms: f64,
}

impl MetricScores {
    /// Scores multiplied by 100, the convention of tabular reports.
    pub fn percent(&self) -> MetricScores {
        MetricScores {
            ari: self.ari * 100.0,
            ami: self.ami * 100.0,
            ri: self.ri * 100.0,
            homogeneity: self.homogeneity * 100.0,
            completeness: self.completeness * 100.0,
            fms: self.fms * 100.0,
        }
    }
}

pub fn score_all(pred: &Partition, truth: &Partition) -> Result<MetricScores> {
    let table = ContingencyTable::new(pred, truth)?;
    let pairs = table.pair_counts();
    let mi = mutual_info_from_table(&table);
    Ok(MetricScores {
        ari: pairs.adjusted_rand_index(),
        ami: mi.ami,
        ri: pairs.rand_index(),
        homogeneity: mi.homogeneity,
        completeness: mi.completeness,
        fms: pairs.fowlkes_mallows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(a: &[usize]) -> Partition {
        Partition::from_labels(a)
    }

    #[test]
    fn perfect_and_permuted_agreement_score_one() {
        let truth = part(&[0, 0, 1, 1, 2, 2, 2]);
        let relabeled = part(&[5, 5, 3, 3, 9, 9, 9]);
        for pred in [&truth, &relabeled] {
            let s = score_all(pred, &truth).unwrap();
            for v in [s.ari, s.ami, s.ri, s.homogeneity, s.completeness, s.fms] {
                assert!((v - 1.0).abs() < 1e-12, "{s:?}");
            }
        }
    }

    #[test]
    fn one_cluster_against_two_balanced_classes() {
        let pred = part(&[0, 0, 0, 0]);
        let truth = part(&[0, 0, 1, 1]);
        let s = score_all(&pred, &truth).unwrap();
        // 6 pairs; 2 together in both, 4 together only in pred
        assert!((s.ri - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.ari, 0.0);
        assert!((s.fms - 2.0 / 12f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.homogeneity, 0.0);
        assert_eq!(s.completeness, 1.0);
        assert_eq!(s.ami, 0.0);
    }

    #[test]
    fn both_single_cluster_is_perfect() {
        let one = part(&[0, 0, 0]);
        let s = score_all(&one, &one).unwrap();
        assert_eq!((s.ari, s.ami, s.homogeneity, s.completeness), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn pure_clusters_are_homogeneous() {
        let truth = part(&[0, 0, 0, 1, 1, 1]);
        let pred = part(&[0, 1, 1, 2, 2, 3]);
        let s = mutual_info_scores(&pred, &truth).unwrap();
        assert!((s.homogeneity - 1.0).abs() < 1e-12);
        assert!(s.completeness < 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            rand_index(&part(&[0, 1]), &part(&[0, 1, 1])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            adjusted_rand_index(&part(&[0]), &part(&[0])),
            Err(Error::TooFewItems(1))
        ));
    }

    #[test]
    fn known_ami_value() {
        // reference value for these labels under the arithmetic-mean normalizer
        // (matches the widely used scikit-learn implementation)
        let truth = part(&[0, 0, 0, 1, 1, 1]);
        let pred = part(&[0, 0, 1, 1, 2, 2]);
        let s = mutual_info_scores(&pred, &truth).unwrap();
        assert!((s.ami - 0.2987924581708903).abs() < 1e-9, "{}", s.ami);
        let ari = adjusted_rand_index(&pred, &truth).unwrap();
        assert!((ari - 0.24242424242424243).abs() < 1e-12);
    }

    #[test]
    fn table_marginals_are_consistent() {
        let t = ContingencyTable::new(&part(&[0, 1, 1, 2, 0]), &part(&[1, 1, 0, 0, 1])).unwrap();
        assert_eq!(t.total(), 5);
        assert_eq!(t.row_sums().iter().sum::<u64>(), 5);
        assert_eq!(t.col_sums().iter().sum::<u64>(), 5);
        assert_eq!(t.counts().iter().flatten().sum::<u64>(), 5);
    }
}
