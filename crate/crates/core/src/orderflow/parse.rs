//! Level-1 CSV reader.
//!
//! Format: header `ts_ms,kind,price,volume,bid,ask`, one event per line,
//! `kind` is `T` (trade, uses `price` and `volume`) or `Q` (quote, uses
//! `bid` and `ask`); non-applicable columns are left empty.

use std::io::Read;
use std::str::FromStr;

use rust_decimal::Decimal;

use super::types::{EventKind, RawEvent};
use crate::error::{Error, Result};

pub const HEADER: &str = "ts_ms,kind,price,volume,bid,ask";
const COLUMNS: [&str; 6] = ["ts_ms", "kind", "price", "volume", "bid", "ask"];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedStream {
    pub events: Vec<RawEvent>,
    /// Events whose timestamp is earlier than the previous event's.
    pub non_monotone: usize,
}

/// Parses a whole level-1 stream. Fails on the first malformed line.
pub fn parse_event_stream<R: Read>(input: R) -> Result<ParsedStream> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);

    let mut out = ParsedStream::default();
    let mut record = csv::ByteRecord::new();
    let mut seen_header = false;
    let mut last_ts = i64::MIN;

    while reader.read_byte_record(&mut record)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record.get(0).is_some_and(|f| f.is_empty()) {
            continue;
        }
        if !seen_header {
            let matches = record.len() == COLUMNS.len()
                && record.iter().zip(COLUMNS).all(|(f, c)| f == c.as_bytes());
            if !matches {
                return Err(Error::parse(line, format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let event = parse_record(&record, line)?;
        if event.timestamp < last_ts {
            out.non_monotone += 1;
        }
        last_ts = event.timestamp;
        out.events.push(event);
    }
    if !seen_header {
        return Err(Error::parse(1, "empty stream, missing header"));
    }
    if out.non_monotone > 0 {
        log::warn!("{} events with non-monotone timestamps", out.non_monotone);
    }
    Ok(out)
}

/// Parses a single data line (no header).
pub fn parse_line(text: &str, line: u64) -> Result<RawEvent> {
    let record = csv::ByteRecord::from(text.split(',').collect::<Vec<_>>());
    parse_record(&record, line)
}

fn parse_record(record: &csv::ByteRecord, line: u64) -> Result<RawEvent> {
    if record.len() != COLUMNS.len() {
        return Err(Error::parse(
            line,
            format!("expected {} fields, found {}", COLUMNS.len(), record.len()),
        ));
    }
    let field = |i: usize| -> Result<&str> {
        std::str::from_utf8(&record[i])
            .map(str::trim)
            .map_err(|_| Error::parse(line, format!("field `{}` is not UTF-8", COLUMNS[i])))
    };

    let timestamp: i64 = field(0)?
        .parse()
        .map_err(|_| Error::parse(line, format!("bad timestamp `{}`", field(0).unwrap_or(""))))?;
    if timestamp < 0 {
        return Err(Error::parse(line, "negative timestamp"));
    }

    let kind = match field(1)? {
        "T" => {
            require_empty(field(4)?, "bid", line)?;
            require_empty(field(5)?, "ask", line)?;
            let price = positive_decimal(field(2)?, "price", line)?;
            let volume: u64 = field(3)?
                .parse()
                .map_err(|_| Error::parse(line, format!("bad volume `{}`", field(3).unwrap_or(""))))?;
            if volume == 0 {
                return Err(Error::parse(line, "zero-volume trade"));
            }
            EventKind::Trade { price, volume }
        }
        "Q" => {
            require_empty(field(2)?, "price", line)?;
            require_empty(field(3)?, "volume", line)?;
            let bid = positive_decimal(field(4)?, "bid", line)?;
            let ask = positive_decimal(field(5)?, "ask", line)?;
            if ask < bid {
                return Err(Error::CrossedQuote { line, bid: bid.to_string(), ask: ask.to_string() });
            }
            EventKind::Quote { bid, ask }
        }
        other => return Err(Error::parse(line, format!("unknown event kind `{other}`"))),
    };
    Ok(RawEvent { timestamp, kind })
}

fn require_empty(s: &str, name: &str, line: u64) -> Result<()> {
    if s.is_empty() {
        Ok(())
    } else {
        Err(Error::parse(line, format!("`{name}` must be empty for this event kind")))
    }
}

fn positive_decimal(s: &str, name: &str, line: u64) -> Result<Decimal> {
    let value = Decimal::from_str_exact(s)
        .or_else(|_| Decimal::from_str(s))
        .map_err(|_| Error::parse(line, format!("bad {name} `{s}`")))?;
    if value <= Decimal::ZERO {
        return Err(Error::parse(line, format!("{name} must be positive, got {s}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rust_decimal::Decimal;

    fn dec(s: &str) -> Decimal {
        Decimal::from_str(s).unwrap()
    }

    #[test]
    fn trade_line() {
        let ev = parse_line("1000,T,100.5,3,,", 2).unwrap();
        assert_eq!(ev, RawEvent::trade(1000, dec("100.5"), 3));
    }

    #[test]
    fn quote_line() {
        let ev = parse_line("1000,Q,,,100.0,100.5", 2).unwrap();
        assert_eq!(ev, RawEvent::quote(1000, dec("100.0"), dec("100.5")));
    }

    #[test]
    fn crossed_quote_is_rejected() {
        let err = parse_line("1000,Q,,,100.5,100.0", 7).unwrap_err();
        assert!(matches!(err, Error::CrossedQuote { line: 7, .. }), "{err}");
    }

    #[test]
    fn zero_volume_is_rejected() {
        assert!(parse_line("1000,T,100.5,0,,", 2).is_err());
    }

    #[test]
    fn error_carries_line_number() {
        let text = format!("{HEADER}\n1000,Q,,,100,101\n1001,X,,,,\n");
        match parse_event_stream(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_header() {
        assert!(parse_event_stream("1000,T,1,1,,\n".as_bytes()).is_err());
        assert!(parse_event_stream("".as_bytes()).is_err());
    }

    #[test]
    fn non_monotone_timestamps_are_counted_not_rejected() {
        let text = format!("{HEADER}\n1000,Q,,,100,101\n999,T,101,1,,\n1005,T,101,1,,\n");
        let parsed = parse_event_stream(text.as_bytes()).unwrap();
        assert_eq!(parsed.events.len(), 3);
        assert_eq!(parsed.non_monotone, 1);
    }

    #[test]
    fn wrong_field_count() {
        let text = format!("{HEADER}\n1000,T,100,1\n");
        assert!(matches!(parse_event_stream(text.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }
}
