use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::build::{build_orders, BuildDiagnostics};
use super::parse::parse_event_stream;
use super::types::{HalfTicks, Session, TradingDay};
use crate::error::{Error, Result};

/// Liquidity threshold used when none is configured: a day is kept only
/// with strictly more trades than this.
pub const DEFAULT_MIN_TRADES: usize = 5000;

/// Fills in `ret` as the midpoint change to the next order of the same day.
/// The last order gets no return.
pub fn compute_returns(mut day: TradingDay) -> TradingDay {
    set_returns(&mut day);
    day
}

pub(crate) fn set_returns(day: &mut TradingDay) {
    let n = day.orders.len();
    for i in 0..n {
        day.orders[i].ret = if i + 1 < n {
            Some(HalfTicks(day.orders[i + 1].mid().0 - day.orders[i].mid().0))
        } else {
            None
        };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_days: usize,
    pub out_of_session_orders: usize,
    pub thin_days: Vec<NaiveDate>,
    pub kept_days: usize,
}

/// Trims each day to `session`, recomputes returns so none crosses the
/// session edge, then drops days with `n_trades <= min_trades`.
pub fn filter_days(
    days: Vec<TradingDay>,
    min_trades: usize,
    session: Session,
) -> Result<(Vec<TradingDay>, FilterReport)> {
    let mut report = FilterReport { input_days: days.len(), ..Default::default() };
    if days.is_empty() {
        return Err(Error::NoUsableDays { reason: "no input days".into() });
    }
    let mut kept = Vec::with_capacity(days.len());
    for mut day in days {
        let before = day.orders.len();
        day.orders.retain(|o| session.contains(o.t));
        report.out_of_session_orders += before - day.orders.len();
        day.session = session;
        set_returns(&mut day);
        if day.n_trades() > min_trades {
            kept.push(day);
        } else {
            report.thin_days.push(day.day_id);
        }
    }
    report.kept_days = kept.len();
    if kept.is_empty() {
        return Err(Error::NoUsableDays {
            reason: format!(
                "liquidity filter removed all {} days (each has <= {} trades inside session)",
                report.input_days, min_trades
            ),
        });
    }
    Ok((kept, report))
}

/// Per-file ingestion counters, written to the diagnostics summary.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayDiagnostics {
    pub day_id: Option<NaiveDate>,
    pub events: usize,
    pub non_monotone_timestamps: usize,
    #[serde(flatten)]
    pub build: BuildDiagnostics,
    pub dropped_trades: usize,
    pub orders: usize,
}

/// Splits `SYMBOL_YYYYMMDD.csv` into its parts.
pub fn parse_day_file_name(name: &str) -> Option<(String, NaiveDate)> {
    let stem = name.strip_suffix(".csv")?;
    let (symbol, date) = stem.rsplit_once('_')?;
    if symbol.is_empty() || date.len() != 8 {
        return None;
    }
    let date = NaiveDate::parse_from_str(date, "%Y%m%d").ok()?;
    Some((symbol.to_string(), date))
}

pub fn day_file_name(symbol: &str, date: NaiveDate) -> String {
    format!("{symbol}_{}.csv", date.format("%Y%m%d"))
}

/// Reads one day's stream into a [`TradingDay`] with returns set over the
/// full file. Session trimming happens later in [`filter_days`].
pub fn read_day<R: std::io::Read>(
    input: R,
    day_id: NaiveDate,
    tick_value: Decimal,
    session: Session,
) -> Result<(TradingDay, DayDiagnostics)> {
    let parsed = parse_event_stream(input)?;
    let built = build_orders(&parsed.events, tick_value)?;
    let diag = DayDiagnostics {
        day_id: Some(day_id),
        events: parsed.events.len(),
        non_monotone_timestamps: parsed.non_monotone,
        dropped_trades: built.diagnostics.dropped_trades(),
        orders: built.orders.len(),
        build: built.diagnostics,
    };
    let day = compute_returns(TradingDay { day_id, orders: built.orders, session, tick_value });
    Ok((day, diag))
}

/// Lists `SYMBOL_*.csv` files in `dir`, sorted by date.
pub fn list_day_files(dir: &Path, symbol: &str) -> Result<Vec<(NaiveDate, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some((sym, date)) = parse_day_file_name(name) {
            if sym == symbol {
                files.push((date, entry.path()));
            }
        }
    }
    files.sort();
    Ok(files)
}

pub fn load_day_file(path: &Path, day_id: NaiveDate, tick_value: Decimal, session: Session) -> Result<(TradingDay, DayDiagnostics)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_day(BufReader::with_capacity(1 << 16, file), day_id, tick_value, session).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })
}
