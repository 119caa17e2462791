//! Simulated scenarios taken through ingestion and analysis.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use tradeclock::analyze::{analyze_days, NullCheck, NULL_SE_TOLERANCE};
use tradeclock::condstats::{impact_cond, seasonality, span_curves};
use tradeclock::config::EstimatorParams;
use tradeclock::orderflow::{compute_returns, MarketOrder, Session, Sign, TradingDay};
use tradeclock::simulate::{simulate_trading_days, RateFn};
use tradeclock::stats::spearman;
use tradeclock::tickmetrics::eta_day;
use tradeclock::verify::{
    coupled_scenario, coupling_ratio, null_scenario, simulate_and_ingest, COUPLING_THRESHOLD_MS, DEFAULT_SEED,
};

#[test]
fn null_data_is_flagged_consistent() {
    let run = simulate_and_ingest(&null_scenario(DEFAULT_SEED)).unwrap();
    let a = analyze_days("SIM", &run.ingested.days, &EstimatorParams::default()).unwrap();
    assert!(a.null_check.null_consistent, "{:?}", a.null_check);
}

#[test]
fn unit_multiplier_behaves_as_null() {
    let mut s = coupled_scenario(DEFAULT_SEED, 1.0);
    s.n_days = 10;
    let days = simulate_trading_days(&s).unwrap();
    let c = span_curves(&days, 1, 30).unwrap();
    assert!(NullCheck::from_span(&c, NULL_SE_TOLERANCE).null_consistent);
    let r = coupling_ratio(&c.variance, COUPLING_THRESHOLD_MS as f64).unwrap();
    assert!((r.ratio - 1.0).abs() < 0.1, "ratio {}", r.ratio);
}

#[test]
fn doubled_amplitude_quadruples_fast_variance() {
    let mut s = coupled_scenario(DEFAULT_SEED, 2.0);
    s.n_days = 10;
    let days = simulate_trading_days(&s).unwrap();
    let c = span_curves(&days, 1, 30).unwrap();
    let r = coupling_ratio(&c.variance, COUPLING_THRESHOLD_MS as f64).unwrap();
    assert!(r.fast_hi <= COUPLING_THRESHOLD_MS as f64);
    assert!((r.ratio / 4.0 - 1.0).abs() < 0.1, "ratio {}", r.ratio);
}

#[test]
fn positive_kernel_gives_positive_impact() {
    let mut s = null_scenario(DEFAULT_SEED);
    s.n_days = 5;
    let days = simulate_trading_days(&s).unwrap();
    let curve = impact_cond(&days, 1, 30).unwrap();
    assert!(curve.rows.iter().all(|r| r.value > 0.0), "{:?}", curve.values());
}

#[test]
fn constant_rate_gives_flat_seasonality() {
    let mut s = null_scenario(DEFAULT_SEED);
    s.n_days = 30;
    s.session_ms = 2 * 3_600_000;
    s.rate_fn = RateFn::Constant { rate: 2.0 };
    let days = simulate_trading_days(&s).unwrap();
    let slots = seasonality(&days, 900_000, 60_000).unwrap();
    assert_eq!(slots.len(), 8);
    for slot in &slots {
        assert!((slot.rate - 2.0).abs() < 3.0 * slot.rate_stderr, "{slot:?}");
    }
}

/// Trade prices whose non-null jumps continue the previous jump with
/// probability `q`, reversing otherwise.
fn continuation_day(rng: &mut ChaCha8Rng, q: f64, n: usize) -> TradingDay {
    let mut price = 10_000i64;
    let mut dir = 1i64;
    let orders = (0..n)
        .map(|k| {
            let o = MarketOrder {
                t: k as i64 * 100,
                price,
                volume: 1,
                bid: price,
                ask: price + 1,
                sign: Sign::Sell,
                ret: None,
            };
            if rng.random_bool(0.5) {
                if !rng.random_bool(q) {
                    dir = -dir;
                }
                price += dir;
            }
            o
        })
        .collect();
    compute_returns(TradingDay {
        day_id: NaiveDate::from_ymd_opt(2024, 1, 2).unwrap(),
        orders,
        session: Session::new(0, n as i64 * 100),
        tick_value: Decimal::ONE,
    })
}

/// More continuation means a smaller perceived tick, so 1/2 - eta rises.
#[test]
fn perceived_tick_ranks_with_continuation() {
    let qs = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
    let seeds = 25u64;
    let mut mean = vec![0.0; qs.len()];
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (j, &q) in qs.iter().enumerate() {
            mean[j] += eta_day(&continuation_day(&mut rng, q, 2_000)).unwrap().perceived() / seeds as f64;
        }
    }
    let rho = spearman(&qs, &mean).unwrap();
    assert!(rho > 0.9, "spearman {rho}: {mean:?}");
    // eta is reversals over twice the continuations
    for (q, m) in qs.iter().zip(&mean) {
        let expected = 0.5 - (1.0 - q) / (2.0 * q);
        assert!((m - expected).abs() < 0.05, "q {q}: {m} vs {expected}");
    }
}
