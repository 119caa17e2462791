//! Two-pass conditional accumulation.
//!
//! Pass one collects the conditioning value of every term and fixes the
//! bin edges; pass two accumulates exact per-bin moments day by day and
//! merges them.

use rayon::prelude::*;

use super::binning::{equal_count_bins_trimmed, BinSpec, TRIM_QUANTILES};
use super::moments::ExactMoments;
use crate::error::Result;
use crate::orderflow::TradingDay;

/// Emits `(conditioning value, quantities)` for every term of a day.
/// Terms never span two days since sources only see one day at a time.
pub(crate) trait TermSource<const K: usize>: Sync {
    fn visit(&self, day: &TradingDay, f: &mut dyn FnMut(i64, [i64; K]));
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct BinStats<const K: usize> {
    pub cond: ExactMoments,
    pub q: [ExactMoments; K],
}

impl<const K: usize> Default for BinStats<K> {
    fn default() -> Self {
        BinStats { cond: ExactMoments::default(), q: [ExactMoments::default(); K] }
    }
}

impl<const K: usize> BinStats<K> {
    fn merge(&mut self, other: &Self) {
        self.cond.merge(&other.cond);
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            a.merge(b);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Binned<const K: usize> {
    pub spec: BinSpec,
    pub bins: Vec<BinStats<K>>,
}

impl<const K: usize> Binned<K> {
    pub fn total(&self) -> BinStats<K> {
        let mut t = BinStats::default();
        self.bins.iter().for_each(|b| t.merge(b));
        t
    }
}

pub(crate) fn conditioning_values<const K: usize, S: TermSource<K>>(days: &[TradingDay], source: &S) -> Vec<f64> {
    let per_day: Vec<Vec<f64>> = days
        .par_iter()
        .map(|day| {
            let mut v = Vec::with_capacity(day.orders.len());
            source.visit(day, &mut |c, _| v.push(c as f64));
            v
        })
        .collect();
    per_day.concat()
}

/// Accumulates one day against fixed edges.
pub(crate) fn accumulate_day<const K: usize, S: TermSource<K>>(
    day: &TradingDay,
    source: &S,
    spec: &BinSpec,
) -> Vec<BinStats<K>> {
    let mut bins = vec![BinStats::<K>::default(); spec.n_bins()];
    source.visit(day, &mut |c, q| {
        if let Some(j) = spec.assign(c as f64) {
            let b = &mut bins[j];
            b.cond.push(c);
            for (m, x) in b.q.iter_mut().zip(q) {
                m.push(x);
            }
        }
    });
    bins
}

pub(crate) fn merge_bins<const K: usize>(parts: impl IntoIterator<Item = Vec<BinStats<K>>>, n_bins: usize) -> Vec<BinStats<K>> {
    let mut acc = vec![BinStats::<K>::default(); n_bins];
    for part in parts {
        for (a, b) in acc.iter_mut().zip(&part) {
            a.merge(b);
        }
    }
    acc
}

pub(crate) fn accumulate_with<const K: usize, S: TermSource<K>>(days: &[TradingDay], source: &S, spec: BinSpec) -> Binned<K> {
    let parts: Vec<Vec<BinStats<K>>> = days.par_iter().map(|d| accumulate_day(d, source, &spec)).collect();
    let bins = merge_bins(parts, spec.n_bins());
    Binned { spec, bins }
}

pub(crate) fn run<const K: usize, S: TermSource<K>>(days: &[TradingDay], source: &S, n_bins: usize) -> Result<Binned<K>> {
    let conds = conditioning_values(days, source);
    let spec = equal_count_bins_trimmed(&conds, n_bins, TRIM_QUANTILES)?;
    Ok(accumulate_with(days, source, spec))
}

/// Terms spanning `n0` trades, causally conditioned:
/// duration `t[i-1+n0] - t[i-1]`, change `mid[i+n0] - mid[i]` in half ticks.
/// Quantities: squared change, non-zero indicator, signed change.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TradeSpanTerms {
    pub n0: usize,
    /// Shifts the conditioning window by this many trades. Zero is the
    /// correct causal estimator; other values exist to check that the
    /// verification catches a misaligned index.
    pub cond_shift: isize,
}

impl TradeSpanTerms {
    pub fn new(n0: usize) -> Self {
        TradeSpanTerms { n0, cond_shift: 0 }
    }
}

impl TermSource<3> for TradeSpanTerms {
    fn visit(&self, day: &TradingDay, f: &mut dyn FnMut(i64, [i64; 3])) {
        let o = &day.orders;
        let n = o.len() as isize;
        let n0 = self.n0 as isize;
        for i in 1..(n - n0).max(1) {
            let a = i - 1 + self.cond_shift;
            let b = a + n0;
            if a < 0 || b >= n {
                continue;
            }
            let dur = o[b as usize].t - o[a as usize].t;
            let d = o[(i + n0) as usize].mid().0 - o[i as usize].mid().0;
            f(dur, [d * d, i64::from(d != 0), o[i as usize].sign.value() * d]);
        }
    }
}

/// Forward `n0`-trade windows: duration `t[i+n0] - t[i]`, quantity the sum
/// of the `n0` prevailing spreads starting at `i`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SpreadTerms {
    pub n0: usize,
}

impl TermSource<1> for SpreadTerms {
    fn visit(&self, day: &TradingDay, f: &mut dyn FnMut(i64, [i64; 1])) {
        let o = &day.orders;
        let n0 = self.n0;
        if o.len() <= n0 {
            return;
        }
        let mut window: i64 = o[..n0].iter().map(|x| x.spread()).sum();
        for i in 0..o.len() - n0 {
            if i > 0 {
                window += o[i + n0 - 1].spread() - o[i - 1].spread();
            }
            f(o[i + n0].t - o[i].t, [window]);
        }
    }
}
