//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::condstats::{DEFAULT_BINS, DEFAULT_DT0_MS};
use crate::error::{Error, Result};
use crate::orderflow::{Session, DEFAULT_MIN_TRADES};
use crate::simulate::SimScenario;

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "TRADECLOCK_OUTPUT_DIR";

fn default_min_trades() -> usize {
    DEFAULT_MIN_TRADES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instrument {
    pub symbol: String,
    pub tick_value: Decimal,
    /// Local exchange clock, `HH:MM` or `HH:MM:SS`.
    pub session_open: String,
    pub session_close: String,
    #[serde(default = "default_min_trades")]
    pub min_trades: usize,
}

impl Instrument {
    pub fn session(&self) -> Result<Session> {
        let parse = |s: &str| {
            Session::parse_clock(s).ok_or_else(|| Error::Config(format!("{}: bad session time `{s}`", self.symbol)))
        };
        let (open, close) = (parse(&self.session_open)?, parse(&self.session_close)?);
        if open >= close {
            return Err(Error::Config(format!("{}: session open must precede close", self.symbol)));
        }
        Ok(Session::new(open, close))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorParams {
    pub n_bins: usize,
    pub dt0_ms: i64,
    /// Trade spans for the fixed-count conditional variance.
    pub var_n0: Vec<usize>,
    pub impact_n0: usize,
    pub spread_n0: usize,
    /// Realized-variance sampling steps; the smallest drives seasonality.
    pub sample_ms: Vec<i64>,
    pub season_bin_ms: i64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            n_bins: DEFAULT_BINS,
            dt0_ms: DEFAULT_DT0_MS,
            var_n0: vec![1, 100],
            impact_n0: 200,
            spread_n0: 100,
            sample_ms: vec![60_000, 300_000],
            season_bin_ms: 900_000,
        }
    }
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_bins == 0 {
            return bad("n_bins must be positive");
        }
        if self.dt0_ms <= 0 || self.season_bin_ms <= 0 {
            return bad("dt0_ms and season_bin_ms must be positive");
        }
        if self.var_n0.is_empty() || self.var_n0.contains(&0) || self.impact_n0 == 0 || self.spread_n0 == 0 {
            return bad("trade spans must be positive and var_n0 non-empty");
        }
        if self.sample_ms.is_empty() || self.sample_ms.iter().any(|&s| s <= 0) {
            return bad("sample_ms must list positive steps");
        }
        Ok(())
    }

    pub fn season_sample_ms(&self) -> i64 {
        self.sample_ms.iter().copied().min().unwrap_or(60_000)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub instruments: Vec<Instrument>,
    #[serde(default)]
    pub estimators: EstimatorParams,
    #[serde(default)]
    pub scenario: Option<SimScenario>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory, and the output directory environment override
    /// is applied.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.data_dir = base.join(&cfg.data_dir);
        cfg.output_dir = match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => base.join(&cfg.output_dir),
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for inst in &self.instruments {
            if inst.symbol.is_empty() || inst.symbol.contains(['/', '\\']) {
                return Err(Error::Config(format!("bad symbol `{}`", inst.symbol)));
            }
            if inst.tick_value <= Decimal::ZERO {
                return Err(Error::Config(format!("{}: tick_value must be positive", inst.symbol)));
            }
            inst.session()?;
        }
        self.estimators.validate()?;
        if let Some(s) = &self.scenario {
            s.validate()?;
        }
        Ok(())
    }

    pub fn instrument(&self, symbol: &str) -> Result<&Instrument> {
        self.instruments
            .iter()
            .find(|i| i.symbol == symbol)
            .ok_or_else(|| Error::Config(format!("symbol `{symbol}` not in config")))
    }
}
