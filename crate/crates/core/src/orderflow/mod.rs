//! Level-1 ingestion: CSV parsing, fill aggregation, trade signing, tick
//! normalization and day filtering.

mod build;
mod day;
mod parse;
mod types;

pub use build::{build_orders, infer_sign, to_ticks, BuildDiagnostics, BuiltOrders, SignClassifier};
pub use day::{
    compute_returns, day_file_name, filter_days, list_day_files, load_day_file, parse_day_file_name, read_day,
    DayDiagnostics, FilterReport, DEFAULT_MIN_TRADES,
};
pub use parse::{parse_event_stream, parse_line, ParsedStream, HEADER};
pub use types::{EventKind, HalfTicks, MarketOrder, Millis, RawEvent, Session, Sign, TradingDay};
