use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp};

use super::scenario::RateFn;
use crate::orderflow::Millis;

/// Inhomogeneous Poisson arrivals on `[0, horizon_s)` by thinning a
/// homogeneous process at `max_rate`. `rate` is queried at increasing
/// times only. Returns seconds since the start.
pub fn thin_arrivals<R: Rng>(rng: &mut R, horizon_s: f64, max_rate: f64, mut rate: impl FnMut(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    // also rejects NaN
    if max_rate.is_nan() || max_rate <= 0.0 {
        return out;
    }
    let exp = Exp::new(max_rate).expect("positive rate");
    let mut t = 0.0;
    loop {
        t += exp.sample(rng);
        if t >= horizon_s {
            return out;
        }
        let u: f64 = rng.random();
        if u * max_rate < rate(t) {
            out.push(t);
        }
    }
}

/// Arrival times in seconds since session open for one day.
pub fn arrival_seconds<R: Rng>(rng: &mut R, rate_fn: &RateFn, horizon_s: f64) -> Vec<f64> {
    let max = rate_fn.max_rate();
    match *rate_fn {
        RateFn::Constant { rate } => thin_arrivals(rng, horizon_s, max, |_| rate),
        RateFn::Sinusoidal { base, amplitude, period_s } => thin_arrivals(rng, horizon_s, max, |t| {
            base + amplitude * (2.0 * std::f64::consts::PI * t / period_s).sin()
        }),
        RateFn::Burst { low, high, switch_rate } => {
            // the regime path gets its own generator so that thinning draws
            // and switching draws do not interleave
            let mut regime_rng = rand_chacha::ChaCha8Rng::from_rng(&mut *rng);
            let mut high_state = regime_rng.random_bool(0.5);
            let hold = (switch_rate > 0.0).then(|| Exp::new(switch_rate).expect("positive rate"));
            let mut next_switch = hold.map_or(f64::INFINITY, |h| h.sample(&mut regime_rng));
            thin_arrivals(rng, horizon_s, max, move |t| {
                while t >= next_switch {
                    high_state = !high_state;
                    next_switch += hold.expect("switching enabled").sample(&mut regime_rng);
                }
                if high_state {
                    high
                } else {
                    low
                }
            })
        }
    }
}

/// Converts to integer milliseconds from `open_ms`, forcing strictly
/// increasing stamps, and drops anything pushed to `close_ms` or later.
pub fn to_distinct_millis(seconds: &[f64], open_ms: Millis, close_ms: Millis) -> Vec<Millis> {
    let mut out: Vec<Millis> = Vec::with_capacity(seconds.len());
    for &s in seconds {
        let mut t = open_ms + (s * 1000.0).floor() as Millis;
        if let Some(&last) = out.last() {
            t = t.max(last + 1);
        }
        if t >= close_ms {
            break;
        }
        out.push(t);
    }
    out
}
