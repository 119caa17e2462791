use std::fmt;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

/// Milliseconds since local midnight of the session day.
pub type Millis = i64;

/// A price quantity measured in half ticks. Midpoints and midpoint returns
/// live on this grid, so they stay exact integers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfTicks(pub i64);

impl HalfTicks {
    pub fn ticks(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfTicks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ticks())
    }
}

/// Aggressor side of a market order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Buy,
    Sell,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Buy => 1,
            Sign::Sell => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Buy => Sign::Sell,
            Sign::Sell => Sign::Buy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Trade { price: Decimal, volume: u64 },
    Quote { bid: Decimal, ask: Decimal },
}

/// One line of a level-1 stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEvent {
    pub timestamp: Millis,
    pub kind: EventKind,
}

impl RawEvent {
    pub fn trade(timestamp: Millis, price: Decimal, volume: u64) -> Self {
        RawEvent { timestamp, kind: EventKind::Trade { price, volume } }
    }

    pub fn quote(timestamp: Millis, bid: Decimal, ask: Decimal) -> Self {
        RawEvent { timestamp, kind: EventKind::Quote { bid, ask } }
    }
}

/// An aggregated market order with the book state prevailing right before it.
///
/// All prices are integer tick counts. `ret` is the midpoint change up to the
/// next order of the same day, absent for the last order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketOrder {
    pub t: Millis,
    pub price: i64,
    pub volume: u64,
    pub bid: i64,
    pub ask: i64,
    pub sign: Sign,
    pub ret: Option<HalfTicks>,
}

impl MarketOrder {
    pub fn mid(&self) -> HalfTicks {
        HalfTicks(self.bid + self.ask)
    }

    pub fn spread(&self) -> i64 {
        self.ask - self.bid
    }
}

/// Intraday session bounds, `open <= t < close`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub open_ms: Millis,
    pub close_ms: Millis,
}

impl Session {
    pub fn new(open_ms: Millis, close_ms: Millis) -> Self {
        Session { open_ms, close_ms }
    }

    pub fn contains(&self, t: Millis) -> bool {
        t >= self.open_ms && t < self.close_ms
    }

    pub fn len_ms(&self) -> Millis {
        self.close_ms - self.open_ms
    }

    /// Parses `HH:MM` or `HH:MM:SS` into milliseconds since midnight.
    pub fn parse_clock(s: &str) -> Option<Millis> {
        let mut parts = s.trim().split(':');
        let h: i64 = parts.next()?.parse().ok()?;
        let m: i64 = parts.next()?.parse().ok()?;
        let sec: i64 = match parts.next() {
            Some(p) => p.parse().ok()?,
            None => 0,
        };
        if parts.next().is_some() || !(0..=24).contains(&h) || !(0..60).contains(&m) || !(0..60).contains(&sec) {
            return None;
        }
        Some(((h * 60 + m) * 60 + sec) * 1000)
    }
}

/// One session's ordered market orders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradingDay {
    pub day_id: NaiveDate,
    pub orders: Vec<MarketOrder>,
    pub session: Session,
    pub tick_value: Decimal,
}

impl TradingDay {
    pub fn n_trades(&self) -> usize {
        self.orders.len()
    }
}
