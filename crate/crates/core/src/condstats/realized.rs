//! Fixed-clock statistics: realized variance on a sampling grid, window
//! samples for the fixed-horizon conditional variance, intraday
//! seasonality and the daily variance against trade count.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::engine::TermSource;
use crate::error::{Error, Result};
use crate::orderflow::{Millis, TradingDay};

/// Previous-tick midpoint lookup for increasing query times.
struct MidSampler<'a> {
    day: &'a TradingDay,
    next: usize,
}

impl<'a> MidSampler<'a> {
    fn new(day: &'a TradingDay) -> Self {
        MidSampler { day, next: 0 }
    }

    /// Midpoint (half ticks) of the last order at or before `t`.
    fn at(&mut self, t: Millis) -> Option<i64> {
        let o = &self.day.orders;
        while self.next < o.len() && o[self.next].t <= t {
            self.next += 1;
        }
        self.next.checked_sub(1).map(|i| o[i].mid().0)
    }
}

/// Sum of squared midpoint changes on the grid `start, start+sample, ..., end`,
/// in quarter ticks squared. `None` if no order precedes `start`.
fn realized_quarter_ticks(day: &TradingDay, sample_ms: Millis, start: Millis, end: Millis) -> Option<i128> {
    let mut sampler = MidSampler::new(day);
    let mut prev = sampler.at(start)?;
    let mut acc: i128 = 0;
    let mut s = start + sample_ms;
    while s <= end {
        let cur = sampler.at(s).unwrap_or(prev);
        let d = (cur - prev) as i128;
        acc += d * d;
        prev = cur;
        s += sample_ms;
    }
    Some(acc)
}

/// Realized variance (ticks squared) of the window `[start, end)` sampled
/// every `sample_ms`, midpoints taken as last known value at each grid
/// time, no mean removed. `Ok(None)` when no order precedes the window.
pub fn realized_variance(day: &TradingDay, sample_ms: Millis, start: Millis, end: Millis) -> Result<Option<f64>> {
    if sample_ms <= 0 || end <= start || (end - start) % sample_ms != 0 {
        return Err(Error::InsufficientData(format!(
            "sampling step {sample_ms} ms does not divide window [{start}, {end})"
        )));
    }
    if start < day.session.open_ms || end > day.session.close_ms {
        return Err(Error::InsufficientData(format!("window [{start}, {end}) outside session")));
    }
    Ok(realized_quarter_ticks(day, sample_ms, start, end).map(|q| q as f64 / 4.0))
}

/// One fixed-horizon window: trade count and squared midpoint change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSample {
    pub t_start: Millis,
    pub n_in_window: u64,
    /// Squared midpoint change in quarter ticks squared.
    pub sq_change_q: i64,
}

impl WindowSample {
    pub fn sq_change(&self) -> f64 {
        self.sq_change_q as f64 / 4.0
    }
}

/// Non-overlapping windows of length `dt0` aligned to the session open,
/// fully inside the session. Windows with no order at or before their
/// start are skipped.
pub fn window_samples(day: &TradingDay, dt0: Millis) -> Vec<WindowSample> {
    let mut out = Vec::new();
    if dt0 <= 0 {
        return out;
    }
    let o = &day.orders;
    let mut sampler = MidSampler::new(day);
    let mut lo_idx = 0usize;
    let mut start = day.session.open_ms;
    while start + dt0 <= day.session.close_ms {
        let end = start + dt0;
        while lo_idx < o.len() && o[lo_idx].t < start {
            lo_idx += 1;
        }
        let hi_idx = lo_idx + o[lo_idx..].partition_point(|x| x.t < end);
        let p0 = sampler.at(start);
        if let Some(p0) = p0 {
            let p1 = sampler.at(end).unwrap_or(p0);
            let d = p1 - p0;
            out.push(WindowSample { t_start: start, n_in_window: (hi_idx - lo_idx) as u64, sq_change_q: d * d });
        }
        start = end;
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct WindowTerms {
    pub dt0: Millis,
}

impl TermSource<1> for WindowTerms {
    fn visit(&self, day: &TradingDay, f: &mut dyn FnMut(i64, [i64; 1])) {
        for w in window_samples(day, self.dt0) {
            if w.n_in_window > 0 {
                f(w.n_in_window as i64, [w.sq_change_q]);
            }
        }
    }
}

/// One intraday slot of the seasonality profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeasonSlot {
    pub start_ms: Millis,
    pub end_ms: Millis,
    pub days: usize,
    /// Mean trades per second across days.
    pub rate: f64,
    pub rate_stderr: f64,
    /// Mean realized variance (ticks squared) across the days where defined.
    pub variance: f64,
    pub variance_stderr: f64,
    pub variance_days: usize,
}

/// Average intraday profile of trading rate and realized variance.
pub fn seasonality(days: &[TradingDay], bin_ms: Millis, sample_ms: Millis) -> Result<Vec<SeasonSlot>> {
    let first = days.first().ok_or_else(|| Error::InsufficientData("no days".into()))?;
    if bin_ms <= 0 || sample_ms <= 0 {
        return Err(Error::InsufficientData("non-positive slot or sampling length".into()));
    }
    let session = first.session;
    let n_slots = (session.len_ms() + bin_ms - 1) / bin_ms;
    let mut slots = Vec::with_capacity(n_slots as usize);
    for k in 0..n_slots {
        let start = session.open_ms + k * bin_ms;
        let end = (start + bin_ms).min(session.close_ms);
        let secs = (end - start) as f64 / 1000.0;
        let mut rates = Vec::with_capacity(days.len());
        let mut vars = Vec::new();
        for day in days {
            let o = &day.orders;
            let lo = o.partition_point(|x| x.t < start);
            let hi = o.partition_point(|x| x.t < end);
            rates.push((hi - lo) as f64 / secs);
            if (end - start) % sample_ms == 0 && start >= day.session.open_ms && end <= day.session.close_ms {
                if let Some(q) = realized_quarter_ticks(day, sample_ms, start, end) {
                    vars.push(q as f64 / 4.0);
                }
            }
        }
        let (rate, rate_stderr) = crate::stats::mean_and_se(&rates).unwrap_or((f64::NAN, f64::NAN));
        let (variance, variance_stderr) = crate::stats::mean_and_se(&vars).unwrap_or((f64::NAN, f64::NAN));
        slots.push(SeasonSlot {
            start_ms: start,
            end_ms: end,
            days: days.len(),
            rate,
            rate_stderr,
            variance,
            variance_stderr,
            variance_days: vars.len(),
        });
    }
    Ok(slots)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailyPoint {
    pub day_id: NaiveDate,
    pub n_trades: usize,
    pub realized_variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DailyScatter {
    pub points: Vec<DailyPoint>,
    pub slope: f64,
}

/// Least-squares slope of `y = c x` through the origin.
pub fn zero_intercept_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are zero".into()));
    }
    Ok(pairs.iter().map(|(x, y)| x * y).sum::<f64>() / sxx)
}

/// Daily realized variance against daily trade count. The grid starts at
/// the first sampling point on or after the day's first order and stops at
/// the last one inside the session.
pub fn daily_scatter_and_slope(days: &[TradingDay], sample_ms: Millis) -> Result<DailyScatter> {
    if sample_ms <= 0 {
        return Err(Error::InsufficientData("non-positive sampling length".into()));
    }
    let mut points = Vec::with_capacity(days.len());
    for day in days {
        let Some(first) = day.orders.first() else { continue };
        let open = day.session.open_ms;
        let offset = (first.t - open).max(0);
        let start = open + (offset + sample_ms - 1) / sample_ms * sample_ms;
        let steps = (day.session.close_ms - start) / sample_ms;
        if steps <= 0 {
            continue;
        }
        let end = start + steps * sample_ms;
        if let Some(q) = realized_quarter_ticks(day, sample_ms, start, end) {
            points.push(DailyPoint { day_id: day.day_id, n_trades: day.n_trades(), realized_variance: q as f64 / 4.0 });
        }
    }
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.n_trades as f64, p.realized_variance)).collect();
    let slope = zero_intercept_slope(&pairs)?;
    Ok(DailyScatter { points, slope })
}
