//! Writes simulated orders back out as level-1 event streams.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rust_decimal::Decimal;

use super::{SimDay, SimScenario};
use crate::error::{Error, Result};
use crate::orderflow::{day_file_name, MarketOrder, HEADER};

pub const SCENARIO_FILE: &str = "scenario.json";

fn price(ticks: i64, tick_value: Decimal) -> Decimal {
    (Decimal::from(ticks) * tick_value).normalize()
}

/// One trade line per order, each preceded by a quote line whenever the
/// quote differs from the last one written. A changed quote is stamped
/// with the previous trade's time, as if revised right after it.
pub fn write_orders<W: Write>(mut w: W, orders: &[MarketOrder], tick_value: Decimal) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    let mut last_quote = None;
    for (i, o) in orders.iter().enumerate() {
        if last_quote != Some((o.bid, o.ask)) {
            let t = if i == 0 { o.t } else { orders[i - 1].t };
            writeln!(w, "{t},Q,,,{},{}", price(o.bid, tick_value), price(o.ask, tick_value))?;
            last_quote = Some((o.bid, o.ask));
        }
        writeln!(w, "{},T,{},{},,", o.t, price(o.price, tick_value), o.volume)?;
    }
    w.flush()
}

pub fn orders_to_bytes(orders: &[MarketOrder], tick_value: Decimal) -> Vec<u8> {
    let mut buf = Vec::with_capacity(orders.len() * 40);
    write_orders(&mut buf, orders, tick_value).expect("writing to memory");
    buf
}

/// Writes `SYMBOL_YYYYMMDD.csv` for every day plus the scenario echo.
pub fn write_dataset(scenario: &SimScenario, days: &[SimDay], dir: &Path, symbol: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::with_capacity(days.len() + 1);
    for day in days {
        let path = dir.join(day_file_name(symbol, day.date));
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_orders(BufWriter::with_capacity(1 << 16, file), &day.orders, scenario.tick_value)
            .map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    let path = dir.join(SCENARIO_FILE);
    let json = serde_json::to_string_pretty(scenario)?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    paths.push(path);
    Ok(paths)
}
