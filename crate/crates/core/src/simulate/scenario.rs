use chrono::NaiveDate;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arrival intensity in trades per second, as a function of time since
/// session open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateFn {
    Constant { rate: f64 },
    /// `base + amplitude * sin(2 pi t / period_s)`.
    Sinusoidal { base: f64, amplitude: f64, period_s: f64 },
    /// Two-state Markov-modulated rate; `switch_rate` is the per-second
    /// hazard of leaving the current state.
    Burst { low: f64, high: f64, switch_rate: f64 },
}

impl RateFn {
    pub fn max_rate(&self) -> f64 {
        match *self {
            RateFn::Constant { rate } => rate,
            RateFn::Sinusoidal { base, amplitude, .. } => base + amplitude.abs(),
            RateFn::Burst { low, high, .. } => low.max(high),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignModel {
    Iid { p_buy: f64 },
    /// Each sign repeats the previous one with probability `persistence`.
    Markov { persistence: f64 },
}

/// Bare impact `G(k)`, `k >= 1` trades after the order; the volume
/// dependence `ln V` multiplies it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Permanent { g0: f64 },
    /// `g0 * (1 + j)^(-exponent)` on the `j`-th quote after the order
    /// (`j = k - 1`), for the first `cutoff` quotes only.
    PowerLaw { g0: f64, exponent: f64, cutoff: usize },
}

pub const DEFAULT_KERNEL_CUTOFF: usize = 1000;

impl Kernel {
    pub fn at(&self, k: usize) -> f64 {
        match *self {
            Kernel::Permanent { g0 } => {
                if k >= 1 {
                    g0
                } else {
                    0.0
                }
            }
            Kernel::PowerLaw { g0, exponent, cutoff } => {
                if k >= 1 && k <= cutoff {
                    g0 * (k as f64).powf(-exponent)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Log-normal volumes rounded to integers, floored at one lot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeModel {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DurationCoupling {
    #[default]
    None,
    /// Trade innovations are multiplied by `m` when the gap since the
    /// previous trade is below `threshold_ms`.
    AmplitudeMultiplier { m: f64, threshold_ms: i64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpreadCoupling {
    #[default]
    None,
    /// Spread `s_high` when the gap preceding the trade is below
    /// `threshold_ms`, `s_low` otherwise.
    RateLinked { s_low: i64, s_high: i64, threshold_ms: i64 },
}

fn default_open() -> i64 {
    8 * 3_600_000
}

fn default_start_price() -> i64 {
    10_000
}

fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 2).expect("valid date")
}

/// Full parameterization of the trading-time generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub seed: u64,
    pub n_days: usize,
    pub session_ms: i64,
    #[serde(default = "default_open")]
    pub session_open_ms: i64,
    pub rate_fn: RateFn,
    pub sign_model: SignModel,
    pub kernel: Kernel,
    pub volume_model: VolumeModel,
    /// Standard deviation (ticks) of the per-trade Gaussian diffusion step.
    pub noise_std: f64,
    #[serde(default)]
    pub duration_coupling: DurationCoupling,
    #[serde(default)]
    pub spread_coupling: SpreadCoupling,
    pub tick_value: Decimal,
    /// Initial latent midpoint, ticks.
    #[serde(default = "default_start_price")]
    pub start_price: i64,
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if self.n_days == 0 {
            return bad("n_days must be at least 1".into());
        }
        if self.session_ms <= 0 || self.session_open_ms < 0 || self.session_open_ms + self.session_ms > 86_400_000 {
            return bad("session must be a positive span inside one day".into());
        }
        match self.rate_fn {
            RateFn::Constant { rate } if !(rate.is_finite() && rate > 0.0) => return bad(format!("rate {rate} must be > 0")),
            RateFn::Sinusoidal { base, amplitude, period_s } => {
                if !(finite_nonneg(base) && amplitude.is_finite() && amplitude.abs() <= base && period_s > 0.0 && base > 0.0) {
                    return bad("sinusoidal rate needs base > 0, |amplitude| <= base, period_s > 0".into());
                }
            }
            RateFn::Burst { low, high, switch_rate }
                if !(finite_nonneg(low) && finite_nonneg(high) && high.max(low) > 0.0 && finite_nonneg(switch_rate)) =>
            {
                return bad("burst rate needs non-negative rates (one positive) and switch_rate".into());
            }
            _ => {}
        }
        match self.sign_model {
            SignModel::Iid { p_buy } if !(0.0..=1.0).contains(&p_buy) => return bad(format!("p_buy {p_buy} outside [0, 1]")),
            SignModel::Markov { persistence } if !(0.0..=1.0).contains(&persistence) => {
                return bad(format!("persistence {persistence} outside [0, 1]"))
            }
            _ => {}
        }
        match self.kernel {
            Kernel::Permanent { g0 } if !g0.is_finite() => return bad("g0 must be finite".into()),
            Kernel::PowerLaw { g0, exponent, cutoff } if !g0.is_finite() || !finite_nonneg(exponent) || cutoff == 0 => {
                return bad("power-law kernel needs finite g0, exponent >= 0, cutoff >= 1".into());
            }
            _ => {}
        }
        if !(self.volume_model.mu.is_finite() && finite_nonneg(self.volume_model.sigma)) {
            return bad("volume model needs finite mu and sigma >= 0".into());
        }
        if !finite_nonneg(self.noise_std) {
            return bad("noise_std must be >= 0".into());
        }
        if let DurationCoupling::AmplitudeMultiplier { m, threshold_ms } = self.duration_coupling {
            if !(m.is_finite() && m >= 1.0) || threshold_ms <= 0 {
                return bad("amplitude multiplier needs m >= 1 and threshold_ms > 0".into());
            }
        }
        if let SpreadCoupling::RateLinked { s_low, s_high, threshold_ms } = self.spread_coupling {
            if s_low < 1 || s_high < 1 || threshold_ms <= 0 {
                return bad("rate-linked spread needs spreads >= 1 tick and threshold_ms > 0".into());
            }
        }
        if self.tick_value <= Decimal::ZERO {
            return bad("tick_value must be positive".into());
        }
        if self.start_price <= 0 {
            return bad("start_price must be positive".into());
        }
        Ok(())
    }

    pub fn date_of(&self, day_index: usize) -> NaiveDate {
        self.start_date + chrono::Days::new(day_index as u64)
    }
}
