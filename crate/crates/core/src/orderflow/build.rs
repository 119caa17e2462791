use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::types::{EventKind, MarketOrder, Millis, RawEvent, Sign};
use crate::error::{Error, Result};

/// Quote rule with tick-test fallback.
///
/// At or through the ask is a buy, at or through the bid is a sell. Inside
/// the spread the sign follows the last price change; a zero change (or no
/// previous trade) repeats the last assigned sign, and `Buy` when there is
/// none.
pub fn infer_sign(price: i64, bid: i64, ask: i64, previous_price: Option<i64>, last_sign: Option<Sign>) -> Sign {
    if price >= ask {
        return Sign::Buy;
    }
    if price <= bid {
        return Sign::Sell;
    }
    match previous_price.map(|p| price.cmp(&p)) {
        Some(std::cmp::Ordering::Greater) => Sign::Buy,
        Some(std::cmp::Ordering::Less) => Sign::Sell,
        _ => last_sign.unwrap_or(Sign::Buy),
    }
}

/// Stateful wrapper around [`infer_sign`] that remembers the previous fill.
#[derive(Clone, Debug, Default)]
pub struct SignClassifier {
    previous_price: Option<i64>,
    last_sign: Option<Sign>,
}

impl SignClassifier {
    pub fn classify(&mut self, price: i64, bid: i64, ask: i64) -> Sign {
        let sign = infer_sign(price, bid, ask, self.previous_price, self.last_sign);
        self.previous_price = Some(price);
        self.last_sign = Some(sign);
        sign
    }
}

/// Converts a currency price to an integer tick count.
pub fn to_ticks(price: Decimal, tick_value: Decimal) -> Result<i64> {
    let off_tick = || Error::OffTick { price: price.to_string(), tick_value: tick_value.to_string() };
    if tick_value <= Decimal::ZERO {
        return Err(off_tick());
    }
    let q = price.checked_div(tick_value).ok_or_else(off_tick)?;
    let rounded = q.round();
    let tol = q.abs() * Decimal::new(1, 9);
    if (q - rounded).abs() > tol {
        return Err(off_tick());
    }
    rounded.to_i64().ok_or_else(off_tick)
}

/// Counters for events that did not make it into a market order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildDiagnostics {
    pub fills: usize,
    pub quotes: usize,
    pub trades_before_quote: usize,
    pub trades_on_locked_book: usize,
}

impl BuildDiagnostics {
    pub fn dropped_trades(&self) -> usize {
        self.trades_before_quote + self.trades_on_locked_book
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuiltOrders {
    pub orders: Vec<MarketOrder>,
    pub diagnostics: BuildDiagnostics,
}

/// Aggregates fills into market orders.
///
/// Consecutive fills with the same millisecond and the same inferred side
/// form one order (summed volume, last fill price), even across quote
/// updates inside that millisecond. The order carries the quote seen
/// strictly before its first fill. Returns are left unset.
pub fn build_orders(events: &[RawEvent], tick_value: Decimal) -> Result<BuiltOrders> {
    let mut out = BuiltOrders::default();
    let mut quote: Option<(i64, i64)> = None;
    let mut classifier = SignClassifier::default();
    let mut run: Option<MarketOrder> = None;

    for event in events {
        match event.kind {
            EventKind::Quote { bid, ask } => {
                out.diagnostics.quotes += 1;
                quote = Some((to_ticks(bid, tick_value)?, to_ticks(ask, tick_value)?));
            }
            EventKind::Trade { price, volume } => {
                out.diagnostics.fills += 1;
                let Some((bid, ask)) = quote else {
                    out.diagnostics.trades_before_quote += 1;
                    continue;
                };
                if ask <= bid {
                    out.diagnostics.trades_on_locked_book += 1;
                    continue;
                }
                let price = to_ticks(price, tick_value)?;
                let sign = classifier.classify(price, bid, ask);
                match run.as_mut() {
                    Some(r) if r.t == event.timestamp && r.sign == sign => {
                        r.volume += volume;
                        r.price = price;
                    }
                    _ => {
                        out.orders.extend(run.take());
                        run = Some(new_order(event.timestamp, price, volume, bid, ask, sign));
                    }
                }
            }
        }
    }
    out.orders.extend(run);
    Ok(out)
}

fn new_order(t: Millis, price: i64, volume: u64, bid: i64, ask: i64, sign: Sign) -> MarketOrder {
    MarketOrder { t, price, volume, bid, ask, sign, ret: None }
}
