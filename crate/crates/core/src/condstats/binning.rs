use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::quantile_sorted;

/// Default number of equal-count bins.
pub const DEFAULT_BINS: usize = 30;
/// Conditioning values outside these quantiles are discarded before binning.
pub const TRIM_QUANTILES: (f64, f64) = (0.001, 0.999);

/// Ascending bin edges on the conditioning variable. Bin `j` is
/// `[edges[j], edges[j+1])`, the last bin is closed on the right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub edges: Vec<f64>,
    pub target_count: usize,
}

impl BinSpec {
    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn bounds(&self, bin: usize) -> (f64, f64) {
        (self.edges[bin], self.edges[bin + 1])
    }

    pub fn assign(&self, x: f64) -> Option<usize> {
        let first = *self.edges.first()?;
        let last = *self.edges.last()?;
        if !(x >= first && x <= last) {
            return None;
        }
        if x == last {
            return Some(self.n_bins() - 1);
        }
        Some(self.edges.partition_point(|&e| e <= x) - 1)
    }
}

/// Edges at the empirical `k / n_bins` quantiles. Duplicate edges (ties)
/// are merged, so fewer bins than requested may come back.
pub fn equal_count_bins(values: &[f64], n_bins: usize) -> Result<BinSpec> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    bins_from_sorted(&sorted, n_bins)
}

/// Same as [`equal_count_bins`] after discarding values outside the
/// `(lo, hi)` quantile range.
pub fn equal_count_bins_trimmed(values: &[f64], n_bins: usize, trim: (f64, f64)) -> Result<BinSpec> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return Err(Error::InsufficientData("no conditioning values".into()));
    }
    let lo = quantile_sorted(&sorted, trim.0);
    let hi = quantile_sorted(&sorted, trim.1);
    let start = sorted.partition_point(|&x| x < lo);
    let end = sorted.partition_point(|&x| x <= hi);
    bins_from_sorted(&sorted[start..end], n_bins)
}

fn bins_from_sorted(sorted: &[f64], n_bins: usize) -> Result<BinSpec> {
    if n_bins == 0 {
        return Err(Error::InsufficientData("zero bins requested".into()));
    }
    if sorted.len() < n_bins {
        return Err(Error::InsufficientData(format!(
            "{} terms for {} bins",
            sorted.len(),
            n_bins
        )));
    }
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(Error::InsufficientData("non-finite conditioning value".into()));
    }
    let mut edges: Vec<f64> = (0..=n_bins)
        .map(|k| quantile_sorted(sorted, k as f64 / n_bins as f64))
        .collect();
    edges.dedup();
    if edges.len() == 1 {
        edges.push(edges[0]);
    }
    Ok(BinSpec { edges, target_count: sorted.len().div_ceil(n_bins) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(spec: &BinSpec, values: &[f64]) -> Vec<usize> {
        let mut c = vec![0; spec.n_bins()];
        for &v in values {
            c[spec.assign(v).unwrap()] += 1;
        }
        c
    }

    #[test]
    fn uniform_ranks() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let spec = equal_count_bins(&v, 4).unwrap();
        assert_eq!(spec.edges, vec![1.0, 25.75, 50.5, 75.25, 100.0]);
        assert_eq!(counts(&spec, &v), vec![25; 4]);
    }

    #[test]
    fn constant_values_give_one_bin() {
        let spec = equal_count_bins(&[3.0; 10], 5).unwrap();
        assert_eq!(spec.n_bins(), 1);
        assert_eq!(spec.assign(3.0), Some(0));
        assert_eq!(spec.assign(3.1), None);
    }

    #[test]
    fn pigeonhole() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        let spec = equal_count_bins(&v, 3).unwrap();
        for c in counts(&spec, &v) {
            assert!(c == 3 || c == 4, "{c}");
        }
    }

    #[test]
    fn too_few_values() {
        assert!(equal_count_bins(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn ties_merge_edges() {
        let mut v = vec![1.0; 50];
        v.extend((2..=51).map(f64::from));
        let spec = equal_count_bins(&v, 10).unwrap();
        assert!(spec.n_bins() < 10);
        assert_eq!(counts(&spec, &v).iter().sum::<usize>(), 100);
    }

    #[test]
    fn trimming_drops_extremes() {
        let mut v: Vec<f64> = (0..10_000).map(f64::from).collect();
        v.push(1e9);
        let spec = equal_count_bins_trimmed(&v, 10, TRIM_QUANTILES).unwrap();
        assert!(*spec.edges.last().unwrap() < 10_000.0);
        assert_eq!(spec.assign(1e9), None);
    }
}
