//! Latent midpoint from the propagator sum plus diffusion.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::scenario::{DurationCoupling, Kernel};
use crate::error::{Error, Result};
use crate::orderflow::{Millis, Sign};

/// Largest latent price (ticks) accepted before the run is declared diverged.
pub const MAX_ABS_PRICE: f64 = 1e9;

/// `x[n] = sum_{i<n} G(n-i) forcing[i]` for `n in 0..forcing.len()`,
/// the impact felt just before trade `n`.
pub fn impact_path(kernel: &Kernel, forcing: &[f64]) -> Vec<f64> {
    let n = forcing.len();
    let mut x = vec![0.0; n];
    match *kernel {
        Kernel::Permanent { g0 } => {
            let mut acc = 0.0;
            for k in 1..n {
                acc += forcing[k - 1];
                x[k] = g0 * acc;
            }
        }
        Kernel::PowerLaw { cutoff, .. } => {
            let g: Vec<f64> = (0..=cutoff.min(n)).map(|k| kernel.at(k)).collect();
            for (i, &f) in forcing.iter().enumerate() {
                if f == 0.0 {
                    continue;
                }
                let reach = (n - i).min(g.len());
                for (xk, gk) in x[i..i + reach].iter_mut().zip(&g[..reach]).skip(1) {
                    *xk += gk * f;
                }
            }
        }
    }
    x
}

/// Per-trade amplitude multipliers. The first trade of a day has no
/// preceding gap and is never scaled.
pub fn multipliers(times: &[Millis], coupling: &DurationCoupling) -> Vec<f64> {
    match *coupling {
        DurationCoupling::None => vec![1.0; times.len()],
        DurationCoupling::AmplitudeMultiplier { m, threshold_ms } => (0..times.len())
            .map(|i| if i > 0 && times[i] - times[i - 1] < threshold_ms { m } else { 1.0 })
            .collect(),
    }
}

pub struct LatentInputs<'a> {
    pub times: &'a [Millis],
    pub signs: &'a [Sign],
    pub volumes: &'a [u64],
    pub kernel: &'a Kernel,
    pub coupling: &'a DurationCoupling,
    pub noise_std: f64,
    pub start_price: f64,
}

/// Latent midpoint (ticks) just before each trade.
pub fn latent_midpoints<R: Rng>(rng: &mut R, inp: &LatentInputs<'_>) -> Result<Vec<f64>> {
    let n = inp.times.len();
    let m = multipliers(inp.times, inp.coupling);
    let forcing: Vec<f64> =
        (0..n).map(|i| m[i] * inp.signs[i].value() as f64 * (inp.volumes[i] as f64).ln()).collect();
    let impact = impact_path(inp.kernel, &forcing);
    let mut noise = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let p = inp.start_price + impact[i] + noise;
        if !p.is_finite() || p.abs() > MAX_ABS_PRICE {
            return Err(Error::SimulationDiverged(format!("latent price {p} at trade {i}")));
        }
        out.push(p);
        let z: f64 = StandardNormal.sample(rng);
        noise += m[i] * inp.noise_std * z;
    }
    Ok(out)
}
