//! Loading one instrument's day files and computing every statistic on them.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condstats::{
    daily_scatter_and_slope, flatness, seasonality, span_curves, spread_cond, var_fixed_dt, BinnedCurve,
    DailyScatter, Flatness, SeasonSlot, SpanCurves,
};
use crate::config::{EstimatorParams, Instrument};
use crate::error::{Error, Result};
use crate::orderflow::{filter_days, list_day_files, load_day_file, read_day, DayDiagnostics, FilterReport, TradingDay};
use crate::tickmetrics::{asset_metrics, TickSizeMetrics};

/// Bins further than this many standard errors from the pooled value make
/// a curve inconsistent with time-independent returns.
pub const NULL_SE_TOLERANCE: f64 = 4.0;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ingested {
    #[serde(skip)]
    pub days: Vec<TradingDay>,
    pub per_day: Vec<DayDiagnostics>,
    pub filter: FilterReport,
}

impl Ingested {
    pub fn events(&self) -> usize {
        self.per_day.iter().map(|d| d.events).sum()
    }
}

fn finish(loaded: Vec<(TradingDay, DayDiagnostics)>, inst: &Instrument) -> Result<Ingested> {
    let (days, per_day): (Vec<_>, Vec<_>) = loaded.into_iter().unzip();
    let (days, filter) = filter_days(days, inst.min_trades, inst.session()?)?;
    Ok(Ingested { days, per_day, filter })
}

/// Parses, builds and filters every `SYMBOL_YYYYMMDD.csv` in `data_dir`.
pub fn load_instrument(data_dir: &Path, inst: &Instrument) -> Result<Ingested> {
    let session = inst.session()?;
    let files = list_day_files(data_dir, &inst.symbol)?;
    let loaded = files
        .par_iter()
        .map(|(date, path)| load_day_file(path, *date, inst.tick_value, session))
        .collect::<Result<Vec<_>>>()?;
    finish(loaded, inst)
}

/// Same as [`load_instrument`] over in-memory streams.
pub fn load_streams<R: Read + Send>(streams: Vec<(NaiveDate, R)>, inst: &Instrument) -> Result<Ingested> {
    let session = inst.session()?;
    let loaded = streams
        .into_par_iter()
        .map(|(date, r)| read_day(r, date, inst.tick_value, session))
        .collect::<Result<Vec<_>>>()?;
    finish(loaded, inst)
}

/// Flatness of the single-trade curves, the signature of returns that do
/// not depend on physical time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullCheck {
    pub variance: Flatness,
    pub prob_nonzero: Flatness,
    pub amp_nonzero: Flatness,
    pub impact: Flatness,
    pub null_consistent: bool,
}

impl NullCheck {
    pub fn from_span(c: &SpanCurves, k_se: f64) -> Self {
        let f = [&c.variance, &c.prob_nonzero, &c.amp_nonzero, &c.impact].map(flatness);
        NullCheck {
            null_consistent: f.iter().all(|x| x.within_se(k_se)),
            variance: f[0],
            prob_nonzero: f[1],
            amp_nonzero: f[2],
            impact: f[3],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub asset: String,
    pub first_day: NaiveDate,
    pub last_day: NaiveDate,
    pub n_days: usize,
    pub tick: TickSizeMetrics,
    pub seasonality: Vec<SeasonSlot>,
    /// One scatter per configured sampling step.
    pub daily: Vec<(i64, DailyScatter)>,
    pub var_fixed_dt: BinnedCurve,
    /// Variance per trade for each configured span, in config order.
    pub var_fixed_n: Vec<BinnedCurve>,
    /// Single-trade curves: variance, P, A and impact.
    pub single: SpanCurves,
    pub impact_n: BinnedCurve,
    pub spread: BinnedCurve,
    pub null_check: NullCheck,
}

impl Analysis {
    /// Every binned curve in output order.
    pub fn curves(&self) -> Vec<&BinnedCurve> {
        let mut out = vec![&self.var_fixed_dt];
        out.extend(&self.var_fixed_n);
        out.extend([&self.single.prob_nonzero, &self.single.amp_nonzero, &self.single.impact, &self.impact_n, &self.spread]);
        out
    }
}

/// Prefixes a data shortfall with the estimator that hit it.
fn named<T>(estimator: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InsufficientData(m) => Error::InsufficientData(format!("{estimator}: {m}")),
        other => other,
    })
}

pub fn analyze_days(asset: &str, days: &[TradingDay], params: &EstimatorParams) -> Result<Analysis> {
    params.validate()?;
    let (Some(first), Some(last)) = (days.first(), days.last()) else {
        return Err(Error::NoUsableDays { reason: "no input days".into() });
    };
    let nb = params.n_bins;
    let single = named("single-trade curves", span_curves(days, 1, nb))?;
    let var_fixed_n = params
        .var_n0
        .iter()
        .map(|&n0| {
            if n0 == 1 {
                Ok(single.variance.clone())
            } else {
                Ok(named(&format!("var_fixed_n N={n0}"), span_curves(days, n0, nb))?.variance)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let impact_n = named(&format!("impact N={}", params.impact_n0), span_curves(days, params.impact_n0, nb))?.impact;
    let daily = params
        .sample_ms
        .iter()
        .map(|&s| Ok((s, named("daily scatter", daily_scatter_and_slope(days, s))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Analysis {
        asset: asset.to_string(),
        first_day: first.day_id,
        last_day: last.day_id,
        n_days: days.len(),
        tick: named("tick metrics", asset_metrics(days))?,
        seasonality: named("seasonality", seasonality(days, params.season_bin_ms, params.season_sample_ms()))?,
        daily,
        var_fixed_dt: named(&format!("var_fixed_dt dt0={} ms", params.dt0_ms), var_fixed_dt(days, params.dt0_ms, nb))?,
        var_fixed_n,
        impact_n,
        spread: named(&format!("spread N={}", params.spread_n0), spread_cond(days, params.spread_n0, nb))?,
        null_check: NullCheck::from_span(&single, NULL_SE_TOLERANCE),
        single,
    })
}
