use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("line {line}: crossed quote (bid {bid} > ask {ask})")]
    CrossedQuote { line: u64, bid: String, ask: String },

    #[error("price {price} is not a multiple of tick value {tick_value}")]
    OffTick { price: String, tick_value: String },

    #[error("no usable days: {reason}")]
    NoUsableDays { reason: String },

    #[error("eta undefined: no same-direction jump pairs")]
    UndefinedEta,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("simulation diverged: {0}")]
    SimulationDiverged(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(line: u64, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
