//! Perceived tick size proxies: fraction of one-tick spreads, fraction of
//! null midpoint returns, and the jump-pair ratio eta on traded prices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orderflow::TradingDay;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaCount {
    pub eta: f64,
    /// Adjacent jump pairs in the same direction.
    pub n_alt: u64,
    /// Adjacent jump pairs in opposite directions.
    pub n_cont: u64,
}

impl EtaCount {
    pub fn perceived(&self) -> f64 {
        0.5 - self.eta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickSizeMetrics {
    pub p_eq: f64,
    pub p_zero: f64,
    pub eta: f64,
    pub perceived: f64,
    pub n_alt: u64,
    pub n_cont: u64,
    pub days_used: usize,
    pub days_skipped: usize,
}

/// Fraction of orders whose prevailing spread is exactly one tick.
pub fn pct_spread_one(day: &TradingDay) -> Result<f64> {
    if day.orders.is_empty() {
        return Err(Error::InsufficientData("empty day".into()));
    }
    let ones = day.orders.iter().filter(|o| o.spread() == 1).count();
    Ok(ones as f64 / day.orders.len() as f64)
}

/// Fraction of defined returns that are zero.
pub fn pct_null_return(day: &TradingDay) -> Result<f64> {
    let (zero, defined) = null_return_counts(day);
    if defined == 0 {
        return Err(Error::InsufficientData("no defined returns".into()));
    }
    Ok(zero as f64 / defined as f64)
}

fn null_return_counts(day: &TradingDay) -> (usize, usize) {
    day.orders.iter().filter_map(|o| o.ret).fold((0, 0), |(z, n), r| (z + usize::from(r.0 == 0), n + 1))
}

/// Counts adjacent jump pairs in a sequence of non-zero price moves.
pub fn eta_from_jumps(jumps: &[i64]) -> Result<EtaCount> {
    let (mut n_alt, mut n_cont) = (0u64, 0u64);
    for pair in jumps.windows(2) {
        if (pair[0] > 0) == (pair[1] > 0) {
            n_alt += 1;
        } else {
            n_cont += 1;
        }
    }
    if n_alt == 0 {
        return Err(Error::UndefinedEta);
    }
    Ok(EtaCount { eta: n_cont as f64 / (2.0 * n_alt as f64), n_alt, n_cont })
}

/// Eta for one day, computed on the aggregated-order traded price series
/// after removing null moves.
pub fn eta_day(day: &TradingDay) -> Result<EtaCount> {
    let jumps: Vec<i64> = day
        .orders
        .windows(2)
        .map(|w| w[1].price - w[0].price)
        .filter(|&d| d != 0)
        .collect();
    if jumps.len() < 3 {
        return Err(Error::InsufficientData(format!("{} non-null price jumps, need 3", jumps.len())));
    }
    eta_from_jumps(&jumps)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PooledEta {
    pub eta: f64,
    pub days_used: usize,
    pub days_skipped: usize,
}

/// Unweighted mean of per-day eta over the days where it is defined.
pub fn eta_pooled(days: &[TradingDay]) -> Result<PooledEta> {
    let per_day: Vec<Result<EtaCount>> = days.iter().map(eta_day).collect();
    pool_eta(per_day.iter().map(|r| r.as_ref().ok().map(|c| c.eta)))
}

/// Pools per-day eta values, `None` marking a skipped day.
pub fn pool_eta(values: impl IntoIterator<Item = Option<f64>>) -> Result<PooledEta> {
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for v in values {
        match v {
            Some(eta) => {
                sum += eta;
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::UndefinedEta);
    }
    Ok(PooledEta { eta: sum / used as f64, days_used: used, days_skipped: skipped })
}

/// Asset-level row: P_= and P_0 pooled over all orders, eta averaged per day.
pub fn asset_metrics(days: &[TradingDay]) -> Result<TickSizeMetrics> {
    let (mut ones, mut total, mut zero, mut defined) = (0usize, 0usize, 0usize, 0usize);
    let (mut n_alt, mut n_cont) = (0u64, 0u64);
    let mut etas = Vec::with_capacity(days.len());
    for day in days {
        ones += day.orders.iter().filter(|o| o.spread() == 1).count();
        total += day.orders.len();
        let (z, d) = null_return_counts(day);
        zero += z;
        defined += d;
        match eta_day(day) {
            Ok(c) => {
                n_alt += c.n_alt;
                n_cont += c.n_cont;
                etas.push(Some(c.eta));
            }
            Err(_) => etas.push(None),
        }
    }
    if total == 0 || defined == 0 {
        return Err(Error::InsufficientData("no orders".into()));
    }
    let pooled = pool_eta(etas)?;
    Ok(TickSizeMetrics {
        p_eq: ones as f64 / total as f64,
        p_zero: zero as f64 / defined as f64,
        eta: pooled.eta,
        perceived: 0.5 - pooled.eta,
        n_alt,
        n_cont,
        days_used: pooled.days_used,
        days_skipped: pooled.days_skipped,
    })
}
