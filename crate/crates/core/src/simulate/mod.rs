//! Synthetic order flow with controllable couplings between trade
//! durations, price innovations and spreads.

mod arrivals;
mod emit;
mod flow;
mod midpoints;
mod quotes;
mod scenario;

pub use arrivals::{arrival_seconds, thin_arrivals, to_distinct_millis};
pub use emit::{orders_to_bytes, write_dataset, write_orders, SCENARIO_FILE};
pub use flow::{gen_signs, gen_volumes};
pub use midpoints::{impact_path, latent_midpoints, multipliers, LatentInputs, MAX_ABS_PRICE};
pub use quotes::{quote_for, spreads};
pub use scenario::{
    DurationCoupling, Kernel, RateFn, SignModel, SimScenario, SpreadCoupling, VolumeModel, DEFAULT_KERNEL_CUTOFF,
};

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::orderflow::{compute_returns, MarketOrder, Session, Sign, TradingDay};

/// Generator for one day, seeded with `seed ^ day_index` so each day can
/// be produced on its own.
pub fn day_rng(seed: u64, day_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ day_index as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimDay {
    pub day_index: usize,
    pub date: NaiveDate,
    pub session: Session,
    pub orders: Vec<MarketOrder>,
    /// Latent midpoint before each order, ticks.
    pub latent: Vec<f64>,
}

impl SimDay {
    pub fn to_trading_day(&self, tick_value: rust_decimal::Decimal) -> TradingDay {
        compute_returns(TradingDay { day_id: self.date, orders: self.orders.clone(), session: self.session, tick_value })
    }
}

pub fn simulate_day(scenario: &SimScenario, day_index: usize) -> Result<SimDay> {
    let mut rng = day_rng(scenario.seed, day_index);
    let open = scenario.session_open_ms;
    let session = Session::new(open, open + scenario.session_ms);
    let secs = arrival_seconds(&mut rng, &scenario.rate_fn, scenario.session_ms as f64 / 1000.0);
    let times = to_distinct_millis(&secs, session.open_ms, session.close_ms);
    let n = times.len();
    let signs = gen_signs(&mut rng, &scenario.sign_model, n);
    let volumes = gen_volumes(&mut rng, &scenario.volume_model, n);
    let latent = latent_midpoints(
        &mut rng,
        &LatentInputs {
            times: &times,
            signs: &signs,
            volumes: &volumes,
            kernel: &scenario.kernel,
            coupling: &scenario.duration_coupling,
            noise_std: scenario.noise_std,
            start_price: scenario.start_price as f64,
        },
    )?;
    let spread = spreads(&times, &scenario.spread_coupling);
    let mut orders = Vec::with_capacity(n);
    for i in 0..n {
        let (bid, ask) = quote_for(latent[i], spread[i])?;
        let price = if signs[i] == Sign::Buy { ask } else { bid };
        orders.push(MarketOrder { t: times[i], price, volume: volumes[i], bid, ask, sign: signs[i], ret: None });
    }
    Ok(SimDay { day_index, date: scenario.date_of(day_index), session, orders, latent })
}

/// Simulates every day of the scenario in parallel. Output is identical
/// for any thread count.
pub fn simulate(scenario: &SimScenario) -> Result<Vec<SimDay>> {
    scenario.validate()?;
    (0..scenario.n_days).into_par_iter().map(|d| simulate_day(scenario, d)).collect()
}

/// Simulated days as analysis input, returns set.
pub fn simulate_trading_days(scenario: &SimScenario) -> Result<Vec<TradingDay>> {
    Ok(simulate(scenario)?.iter().map(|d| d.to_trading_day(scenario.tick_value)).collect())
}
