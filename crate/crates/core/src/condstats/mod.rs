//! Conditional and unconditional variance, impact and spread estimators.
//!
//! Every conditional estimator bins its terms at equal-count quantiles of
//! the conditioning variable and reports per-bin means with standard
//! errors. Terms are exact integers (half ticks, ticks, milliseconds), so
//! per-day partial results merge identically in any order.

mod binning;
mod curves;
mod engine;
mod moments;
mod realized;

pub use binning::{equal_count_bins, equal_count_bins_trimmed, BinSpec, DEFAULT_BINS, TRIM_QUANTILES};
pub use curves::{
    amp_nonzero, flatness, impact_cond, prob_nonzero, span_curves, span_curves_on, spread_cond, var_fixed_dt,
    var_fixed_n, BinRow, BinnedCurve, CurveMeta, Flatness, SpanCurves,
};
pub use moments::ExactMoments;
pub use realized::{
    daily_scatter_and_slope, realized_variance, seasonality, window_samples, zero_intercept_slope, DailyPoint,
    DailyScatter, SeasonSlot, WindowSample,
};

#[cfg(test)]
pub(crate) use curves::span_curves_with;
#[cfg(test)]
pub(crate) use engine::TradeSpanTerms;

/// Default fixed horizon for the window-count conditioned variance (5 min).
pub const DEFAULT_DT0_MS: i64 = 300_000;

#[cfg(test)]
mod tests;
