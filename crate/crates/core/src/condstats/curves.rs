use serde::{Deserialize, Serialize};

use super::binning::BinSpec;
use super::engine::{self, BinStats, Binned, SpreadTerms, TradeSpanTerms};
use super::moments::ExactMoments;
use super::realized::WindowTerms;
use crate::error::{Error, Result};
use crate::orderflow::{Millis, TradingDay};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub estimator: String,
    pub n0: Option<usize>,
    pub dt0_ms: Option<Millis>,
    pub n_bins: usize,
    /// What `bin_lo`, `bin_hi` and `bin_center` measure.
    pub abscissa: String,
    pub unit: String,
}

/// One reported bin. `lo`, `hi` and `center` are in abscissa units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin: usize,
    pub lo: f64,
    pub hi: f64,
    pub center: f64,
    pub count: u64,
    pub value: f64,
    pub stderr: f64,
}

/// An equal-count binned conditional statistic, rows sorted by abscissa.
/// Bins with fewer than two terms are not reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinnedCurve {
    pub meta: CurveMeta,
    pub rows: Vec<BinRow>,
    /// The statistic computed over every binned term at once.
    pub pooled: f64,
    pub pooled_count: u64,
}

impl BinnedCurve {
    pub fn centers(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.center).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn row_for_bin(&self, bin: usize) -> Option<&BinRow> {
        self.rows.iter().find(|r| r.bin == bin)
    }
}

/// Mean and standard error of `m` scaled by `scale`.
fn scaled(m: &ExactMoments, scale: f64) -> (f64, f64) {
    (m.mean() * scale, m.std_error() * scale)
}

struct RowSpec {
    count: u64,
    value: f64,
    stderr: f64,
}

fn build_rows<const K: usize>(
    spec: &BinSpec,
    bins: &[BinStats<K>],
    abscissa: impl Fn(f64) -> f64,
    row: impl Fn(&BinStats<K>) -> RowSpec,
) -> Vec<BinRow> {
    let mut rows: Vec<BinRow> = bins
        .iter()
        .enumerate()
        .filter_map(|(j, b)| {
            let r = row(b);
            if r.count < 2 {
                return None;
            }
            let (lo, hi) = spec.bounds(j);
            let (a, c) = (abscissa(lo), abscissa(hi));
            Some(BinRow {
                bin: j,
                lo: a.min(c),
                hi: a.max(c),
                center: abscissa(b.cond.mean()),
                count: r.count,
                value: r.value,
                stderr: r.stderr,
            })
        })
        .collect();
    rows.sort_by(|a, b| a.center.total_cmp(&b.center));
    rows
}

fn meta(estimator: &str, n0: Option<usize>, dt0_ms: Option<Millis>, n_bins: usize, abscissa: &str, unit: &str) -> CurveMeta {
    CurveMeta {
        estimator: estimator.into(),
        n0,
        dt0_ms,
        n_bins,
        abscissa: abscissa.into(),
        unit: unit.into(),
    }
}

/// Curves sharing one set of duration bins over `n0`-trade spans: variance
/// per trade, probability of a non-zero change, squared amplitude of the
/// non-zero changes, and signed impact.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanCurves {
    pub spec: BinSpec,
    pub variance: BinnedCurve,
    pub prob_nonzero: BinnedCurve,
    pub amp_nonzero: BinnedCurve,
    pub impact: BinnedCurve,
}

const SQ: usize = 0;
const NZ: usize = 1;
const SIGNED: usize = 2;

fn span_curves_from(binned: Binned<3>, n0: usize, n_bins: usize) -> SpanCurves {
    let Binned { spec, bins } = binned;
    let total = {
        let mut t = BinStats::<3>::default();
        for b in &bins {
            t.cond.merge(&b.cond);
            for k in 0..3 {
                t.q[k].merge(&b.q[k]);
            }
        }
        t
    };
    let n0f = n0 as f64;
    let var_scale = 0.25 / n0f;
    let id = |x: f64| x;
    let abscissa = "duration_ms";

    let variance_row = |b: &BinStats<3>| {
        let (value, stderr) = scaled(&b.q[SQ], var_scale);
        RowSpec { count: b.q[SQ].count, value, stderr }
    };
    let prob_row = |b: &BinStats<3>| {
        let (value, stderr) = scaled(&b.q[NZ], 1.0);
        RowSpec { count: b.q[NZ].count, value, stderr }
    };
    // Zero changes add nothing to the squared sums, so the non-zero subset
    // has the same sums and the non-zero count.
    let amp_moments = |b: &BinStats<3>| ExactMoments {
        count: b.q[NZ].sum as u64,
        sum: b.q[SQ].sum,
        sum_sq: b.q[SQ].sum_sq,
    };
    let amp_row = |b: &BinStats<3>| {
        let m = amp_moments(b);
        let (value, stderr) = scaled(&m, 0.25);
        RowSpec { count: m.count, value, stderr }
    };
    let impact_row = |b: &BinStats<3>| {
        let (value, stderr) = scaled(&b.q[SIGNED], 0.5);
        RowSpec { count: b.q[SIGNED].count, value, stderr }
    };

    let curve = |name: &str, unit: &str, rows: Vec<BinRow>, pooled: f64, pooled_count: u64| BinnedCurve {
        meta: meta(name, Some(n0), None, n_bins, abscissa, unit),
        rows,
        pooled,
        pooled_count,
    };
    let amp_total = amp_moments(&total);
    SpanCurves {
        variance: curve(
            "var_fixed_n",
            "ticks^2 per trade",
            build_rows(&spec, &bins, id, variance_row),
            total.q[SQ].mean() * var_scale,
            total.q[SQ].count,
        ),
        prob_nonzero: curve(
            "prob_nonzero",
            "probability",
            build_rows(&spec, &bins, id, prob_row),
            total.q[NZ].mean(),
            total.q[NZ].count,
        ),
        amp_nonzero: curve(
            "amp_nonzero",
            "ticks^2",
            build_rows(&spec, &bins, id, amp_row),
            amp_total.mean() * 0.25,
            amp_total.count,
        ),
        impact: curve(
            "impact_cond",
            "ticks",
            build_rows(&spec, &bins, id, impact_row),
            total.q[SIGNED].mean() * 0.5,
            total.q[SIGNED].count,
        ),
        spec,
    }
}

pub(crate) fn span_curves_with(days: &[TradingDay], terms: TradeSpanTerms, n_bins: usize) -> Result<SpanCurves> {
    if terms.n0 == 0 {
        return Err(Error::InsufficientData("n0 must be at least 1".into()));
    }
    let binned = engine::run(days, &terms, n_bins)?;
    Ok(span_curves_from(binned, terms.n0, n_bins))
}

/// All `n0`-trade span curves on shared causal-duration bins.
pub fn span_curves(days: &[TradingDay], n0: usize, n_bins: usize) -> Result<SpanCurves> {
    span_curves_with(days, TradeSpanTerms::new(n0), n_bins)
}

/// Same as [`span_curves`] with caller-fixed bin edges.
pub fn span_curves_on(days: &[TradingDay], n0: usize, spec: BinSpec) -> Result<SpanCurves> {
    if n0 == 0 {
        return Err(Error::InsufficientData("n0 must be at least 1".into()));
    }
    let n_bins = spec.n_bins();
    Ok(span_curves_from(engine::accumulate_with(days, &TradeSpanTerms::new(n0), spec), n0, n_bins))
}

/// Variance per trade over `n0`-trade spans against the causal duration
/// `t[i-1+n0] - t[i-1]`.
pub fn var_fixed_n(days: &[TradingDay], n0: usize, n_bins: usize) -> Result<BinnedCurve> {
    Ok(span_curves(days, n0, n_bins)?.variance)
}

/// Probability of a non-zero single-trade return given the preceding gap.
pub fn prob_nonzero(days: &[TradingDay], n_bins: usize) -> Result<BinnedCurve> {
    Ok(span_curves(days, 1, n_bins)?.prob_nonzero)
}

/// Mean squared single-trade return over non-zero returns, given the gap.
pub fn amp_nonzero(days: &[TradingDay], n_bins: usize) -> Result<BinnedCurve> {
    Ok(span_curves(days, 1, n_bins)?.amp_nonzero)
}

/// Mean signed midpoint change over `n0` trades given the causal duration.
pub fn impact_cond(days: &[TradingDay], n0: usize, n_bins: usize) -> Result<BinnedCurve> {
    Ok(span_curves(days, n0, n_bins)?.impact)
}

fn spread_curve(binned: Binned<1>, n0: usize, n_bins: usize) -> BinnedCurve {
    let total = binned.total();
    let n0f = n0 as f64;
    let rows = build_rows(&binned.spec, &binned.bins, |x| x / n0f, |b| {
        let (value, stderr) = scaled(&b.q[0], 1.0 / n0f);
        RowSpec { count: b.q[0].count, value, stderr }
    });
    BinnedCurve {
        meta: meta("spread_cond", Some(n0), None, n_bins, "duration_ms_per_trade", "ticks"),
        rows,
        pooled: total.q[0].mean() / n0f,
        pooled_count: total.q[0].count,
    }
}

/// Mean spread over the next `n0` orders against the forward duration
/// `t[i+n0] - t[i]`, reported against that duration divided by `n0`.
pub fn spread_cond(days: &[TradingDay], n0: usize, n_bins: usize) -> Result<BinnedCurve> {
    if n0 == 0 {
        return Err(Error::InsufficientData("n0 must be at least 1".into()));
    }
    let binned = engine::run(days, &SpreadTerms { n0 }, n_bins)?;
    Ok(spread_curve(binned, n0, n_bins))
}

/// Variance per trade over fixed `dt0` windows, binned by the window's
/// trade count and reported against the average intertrade duration
/// `dt0 / mean(n)`.
pub fn var_fixed_dt(days: &[TradingDay], dt0: Millis, n_bins: usize) -> Result<BinnedCurve> {
    if dt0 <= 0 {
        return Err(Error::InsufficientData("dt0 must be positive".into()));
    }
    let binned = engine::run(days, &WindowTerms { dt0 }, n_bins)?;
    let total = binned.total();
    let dt0f = dt0 as f64;
    let rows = build_rows(&binned.spec, &binned.bins, |n| dt0f / n, |b| {
        let n_mean = b.cond.mean();
        let (sq, sq_se) = scaled(&b.q[0], 0.25);
        RowSpec { count: b.q[0].count, value: sq / n_mean, stderr: sq_se / n_mean }
    });
    Ok(BinnedCurve {
        meta: meta("var_fixed_dt", None, Some(dt0), n_bins, "mean_intertrade_ms", "ticks^2 per trade"),
        rows,
        pooled: total.q[0].mean() * 0.25 / total.cond.mean(),
        pooled_count: total.q[0].count,
    })
}

/// Per-bin comparison against the pooled value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub pooled: f64,
    /// Largest |value - pooled| / stderr over the reported bins.
    pub max_z: f64,
    /// Largest |value - pooled| / |pooled|.
    pub max_rel: f64,
}

impl Flatness {
    pub fn within_se(&self, k: f64) -> bool {
        self.max_z < k
    }

    pub fn within_rel(&self, tol: f64) -> bool {
        self.max_rel < tol
    }
}

pub fn flatness(curve: &BinnedCurve) -> Flatness {
    let pooled = curve.pooled;
    let mut max_z: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for r in &curve.rows {
        let dev = (r.value - pooled).abs();
        let z = if dev == 0.0 { 0.0 } else if r.stderr > 0.0 { dev / r.stderr } else { f64::INFINITY };
        max_z = max_z.max(z);
        max_rel = max_rel.max(if pooled != 0.0 { dev / pooled.abs() } else if dev == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Flatness { pooled, max_z, max_rel }
}
