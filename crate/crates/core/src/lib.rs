//! Duration-conditioned microstructure statistics for level-1 futures data.
//!
//! The crate ingests trade and best-quote streams, rebuilds aggregated market
//! orders, and estimates how variance per trade, impact and spread depend on
//! the intertrade duration. A trading-time simulator generates streams with
//! known ground truth for checking every estimator.

pub mod analyze;
pub mod condstats;
pub mod config;
pub mod error;
pub mod orderflow;
pub mod report;
pub mod simulate;
pub mod stats;
pub mod tickmetrics;
pub mod verify;

pub use error::{Error, Result};
