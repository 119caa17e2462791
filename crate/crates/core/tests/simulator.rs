use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use tradeclock::orderflow::Sign;
use tradeclock::simulate::{
    arrival_seconds, day_rng, gen_signs, impact_path, simulate, simulate_day, write_dataset, DurationCoupling, Kernel,
    RateFn, SignModel, SimScenario, SpreadCoupling, VolumeModel,
};

fn scenario(seed: u64) -> SimScenario {
    SimScenario {
        seed,
        n_days: 2,
        session_ms: 600_000,
        session_open_ms: 8 * 3_600_000,
        rate_fn: RateFn::Constant { rate: 5.0 },
        sign_model: SignModel::Iid { p_buy: 0.5 },
        kernel: Kernel::PowerLaw { g0: 0.5, exponent: 0.5, cutoff: 200 },
        volume_model: VolumeModel { mu: 1.0, sigma: 0.8 },
        noise_std: 0.3,
        duration_coupling: DurationCoupling::None,
        spread_coupling: SpreadCoupling::None,
        tick_value: Decimal::new(1, 2),
        start_price: 10_000,
        start_date: NaiveDate::from_ymd_opt(2024, 1, 2).unwrap(),
    }
}

#[test]
fn poisson_counts_stay_within_four_sigma() {
    let rate = RateFn::Constant { rate: 10.0 };
    let band = 4.0 * 36_000f64.sqrt();
    for seed in 0..10u64 {
        let n = arrival_seconds(&mut day_rng(seed << 32, 0), &rate, 3600.0).len() as f64;
        assert!((n - 36_000.0).abs() < band, "seed {seed}: {n} arrivals");
    }
}

#[test]
fn sinusoidal_counts_follow_rate_integral() {
    let (base, amp, period) = (1.0, 0.8, 14_400.0);
    let rate = RateFn::Sinusoidal { base, amplitude: amp, period_s: period };
    let slot = 900.0;
    let n_slots = (period / slot) as usize;
    let mut counts = vec![0usize; n_slots];
    let days = 100;
    for day in 0..days {
        for s in arrival_seconds(&mut day_rng(77, day), &rate, period) {
            counts[((s / slot) as usize).min(n_slots - 1)] += 1;
        }
    }
    // midpoint-rule integral of the rate over each slot
    let steps = 10_000;
    let mut sq = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let h = slot / steps as f64;
        let integral: f64 = (0..steps)
            .map(|j| {
                let t = k as f64 * slot + (j as f64 + 0.5) * h;
                (base + amp * (2.0 * std::f64::consts::PI * t / period).sin()) * h
            })
            .sum();
        sq += (c as f64 / (days as f64 * integral) - 1.0).powi(2);
    }
    let rms = (sq / n_slots as f64).sqrt();
    assert!(rms < 0.05, "rms {rms}");
}

#[test]
fn markov_signs_have_lag_one_correlation_two_rho_minus_one() {
    let signs = gen_signs(&mut ChaCha8Rng::seed_from_u64(5), &SignModel::Markov { persistence: 0.8 }, 1_000_000);
    let x: Vec<f64> = signs.iter().map(|s| s.value() as f64).collect();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let cov: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    let rho = cov / var;
    assert!((rho - 0.6).abs() < 0.02, "lag-1 autocorrelation {rho}");
}

#[test]
fn degenerate_sign_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(gen_signs(&mut rng, &SignModel::Iid { p_buy: 1.0 }, 500).iter().all(|&s| s == Sign::Buy));
    let run = gen_signs(&mut rng, &SignModel::Markov { persistence: 1.0 }, 500);
    assert!(run.iter().all(|&s| s == run[0]));
}

#[test]
fn permanent_kernel_telescopes() {
    let g0 = 0.75;
    let x = impact_path(&Kernel::Permanent { g0 }, &[1.0; 50]);
    for (n, p) in x.iter().enumerate() {
        assert!((p - n as f64 * g0).abs() < 1e-12, "p[{n}] = {p}");
    }
}

/// With one lag the kernel is purely transient: the level after trade n-1
/// is that trade's forcing alone.
#[test]
fn single_lag_kernel_is_transient() {
    let f: Vec<f64> = (0..100).map(|k| ((k * 37 % 11) as f64 - 5.0) * 0.3).collect();
    let x = impact_path(&Kernel::PowerLaw { g0: 0.7, exponent: 3.0, cutoff: 1 }, &f);
    assert_eq!(x[0], 0.0);
    for n in 1..f.len() {
        assert!((x[n] - 0.7 * f[n - 1]).abs() < 1e-12);
    }
}

fn random_forcing(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signs: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let log_v: Vec<f64> = (0..n).map(|_| (rng.random_range(1..500) as f64).ln()).collect();
    (signs, log_v)
}

#[test]
fn doubling_g0_doubles_every_change() {
    let (signs, log_v) = random_forcing(3, 2000);
    let f: Vec<f64> = signs.iter().zip(&log_v).map(|(e, l)| e * l).collect();
    for (k1, k2) in [
        (Kernel::Permanent { g0: 0.4 }, Kernel::Permanent { g0: 0.8 }),
        (Kernel::PowerLaw { g0: 0.4, exponent: 0.6, cutoff: 300 }, Kernel::PowerLaw { g0: 0.8, exponent: 0.6, cutoff: 300 }),
    ] {
        let (a, b) = (impact_path(&k1, &f), impact_path(&k2, &f));
        for n in 1..a.len() {
            let (da, db) = (a[n] - a[n - 1], b[n] - b[n - 1]);
            assert!((db - 2.0 * da).abs() <= 1e-9 * da.abs().max(1.0), "n {n}: {da} vs {db}");
        }
    }
}

/// Scaling every volume by e adds one to each ln V, which adds the
/// sign-weighted kernel path.
#[test]
fn volume_scale_adds_kernel_weighted_signs() {
    let (signs, log_v) = random_forcing(4, 1500);
    for kernel in [Kernel::Permanent { g0: 0.5 }, Kernel::PowerLaw { g0: 0.5, exponent: 0.4, cutoff: 100 }] {
        let f: Vec<f64> = signs.iter().zip(&log_v).map(|(e, l)| e * l).collect();
        let f_scaled: Vec<f64> = signs.iter().zip(&log_v).map(|(e, l)| e * (l + 1.0)).collect();
        let base = impact_path(&kernel, &f);
        let scaled = impact_path(&kernel, &f_scaled);
        let shift = impact_path(&kernel, &signs);
        for n in 0..base.len() {
            assert!((scaled[n] - base[n] - shift[n]).abs() < 1e-8, "n {n}");
        }
        // direct sum for the power law
        if let Kernel::PowerLaw { g0, exponent, cutoff } = kernel {
            let n = 700;
            let direct: f64 = (0..n).filter(|i| n - i <= cutoff).map(|i| g0 * ((n - i) as f64).powf(-exponent) * signs[i]).sum();
            assert!((shift[n] - direct).abs() < 1e-9);
        }
    }
}

#[test]
fn same_seed_writes_identical_files() {
    let s = scenario(42);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let pa = write_dataset(&s, &simulate(&s).unwrap(), a.path(), "SIM").unwrap();
    let pb = write_dataset(&s, &simulate(&s).unwrap(), b.path(), "SIM").unwrap();
    assert_eq!(pa.len(), 3);
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn different_seeds_start_differently() {
    let firsts: Vec<i64> = (0..20u64)
        .map(|k| {
            let mut s = scenario(1000 + k);
            s.n_days = 1;
            simulate_day(&s, 0).unwrap().orders[0].t
        })
        .collect();
    let mut distinct = firsts.clone();
    distinct.sort();
    distinct.dedup();
    assert!(distinct.len() >= 18, "{firsts:?}");
}

#[test]
fn spreads_follow_coupling() {
    let mut s = scenario(9);
    let day = simulate_day(&s, 0).unwrap();
    assert!(day.orders.iter().all(|o| o.ask - o.bid == 1));

    s.rate_fn = RateFn::Constant { rate: 200.0 };
    s.spread_coupling = SpreadCoupling::RateLinked { s_low: 1, s_high: 3, threshold_ms: 1_000 };
    let day = simulate_day(&s, 0).unwrap();
    // every gap is below a second at this rate; only the first order has no gap
    assert!(day.orders[1..].iter().all(|o| o.ask - o.bid == 3));
}

#[test]
fn runaway_prices_are_rejected() {
    let mut s = scenario(1);
    s.kernel = Kernel::Permanent { g0: 1e7 };
    s.sign_model = SignModel::Iid { p_buy: 1.0 };
    assert!(simulate(&s).is_err());
}
