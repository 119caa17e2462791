use super::scenario::SpreadCoupling;
use crate::error::{Error, Result};
use crate::orderflow::Millis;

/// Spread (ticks) prevailing before each trade.
pub fn spreads(times: &[Millis], coupling: &SpreadCoupling) -> Vec<i64> {
    match *coupling {
        SpreadCoupling::None => vec![1; times.len()],
        SpreadCoupling::RateLinked { s_low, s_high, threshold_ms } => (0..times.len())
            .map(|i| if i > 0 && times[i] - times[i - 1] < threshold_ms { s_high } else { s_low })
            .collect(),
    }
}

/// Best bid and ask around a latent midpoint. The midpoint is rounded to
/// the nearest half-tick value compatible with the spread parity.
pub fn quote_for(latent: f64, spread: i64) -> Result<(i64, i64)> {
    let parity = spread.rem_euclid(2);
    let mid2 = parity + 2 * ((2.0 * latent - parity as f64) / 2.0).round() as i64;
    let bid = (mid2 - spread).div_euclid(2);
    if bid <= 0 {
        return Err(Error::SimulationDiverged(format!("bid {bid} at latent price {latent}")));
    }
    Ok((bid, bid + spread))
}
