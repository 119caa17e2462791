use chrono::NaiveDate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use super::engine::{accumulate_day, accumulate_with, merge_bins, TradeSpanTerms};
use super::*;
use crate::orderflow::{compute_returns, MarketOrder, Session, Sign, TradingDay};

/// Builds a day from per-order (time, mid in half ticks, spread, sign).
/// Odd spreads need odd half-tick mids and vice versa.
fn day_from(rows: &[(i64, i64, i64, Sign)]) -> TradingDay {
    let orders = rows
        .iter()
        .map(|&(t, mid2, spread, sign)| {
            assert_eq!((mid2 - spread).rem_euclid(2), 0, "parity");
            let bid = (mid2 - spread) / 2;
            let ask = bid + spread;
            let price = if sign == Sign::Buy { ask } else { bid };
            MarketOrder { t, price, volume: 1, bid, ask, sign, ret: None }
        })
        .collect();
    let end = rows.last().map_or(1, |r| r.0 + 1);
    compute_returns(TradingDay {
        day_id: NaiveDate::from_ymd_opt(2024, 1, 2).unwrap(),
        orders,
        session: Session::new(0, end.max(1)),
        tick_value: Decimal::ONE,
    })
}

/// Orders with the given gaps before each order and midpoint changes
/// (half ticks) after each order. Spread 1, so changes must be even.
fn day_from_gaps(gaps: &[i64], changes: &[i64], sign: Sign) -> TradingDay {
    assert_eq!(gaps.len(), changes.len());
    let mut t = 0;
    let mut mid = 2001;
    let rows: Vec<_> = gaps
        .iter()
        .zip(changes)
        .map(|(&g, &c)| {
            t += g;
            let row = (t, mid, 1, sign);
            mid += c;
            row
        })
        .collect();
    day_from(&rows)
}

#[test]
fn gap_dependent_single_trade_returns() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut gaps = vec![5];
    let mut changes = vec![0];
    // 2002 orders give terms 1..=2000, half of them fast
    for i in 1..2002 {
        let fast = i % 2 == 1;
        gaps.push(if fast { 5 } else { 5000 });
        changes.push(if fast { if rng.random_bool(0.5) { 2 } else { -2 } } else { 0 });
    }
    let day = day_from_gaps(&gaps, &changes, Sign::Buy);
    let curve = var_fixed_n(&[day], 1, 2).unwrap();
    assert_eq!(curve.rows.len(), 2);
    assert_eq!(curve.rows[0].value, 1.0);
    assert_eq!(curve.rows[1].value, 0.0);
}

#[test]
fn prob_nonzero_counts() {
    // returns 0, 0, 1, -1 on orders 1..=4; order 0 has no preceding gap
    let day = day_from_gaps(&[10; 6], &[2, 0, 0, 2, -2, 0], Sign::Buy);
    let p = prob_nonzero(std::slice::from_ref(&day), 1).unwrap();
    assert_eq!(p.rows[0].count, 4);
    assert_eq!(p.rows[0].value, 0.5);
    let gaps: Vec<i64> = (0..20).map(|i| 10 * (i % 4 + 1)).collect();
    let flat = day_from_gaps(&gaps, &[0; 20], Sign::Buy);
    assert!(prob_nonzero(&[flat], 2).unwrap().rows.iter().all(|r| r.value == 0.0));
}

#[test]
fn amplitude_of_unit_moves() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gaps: Vec<i64> = (0..500).map(|_| rng.random_range(1..1000)).collect();
    let changes: Vec<i64> = (0..500).map(|_| [0, 2, -2][rng.random_range(0..3)]).collect();
    let a = amp_nonzero(&[day_from_gaps(&gaps, &changes, Sign::Buy)], 5).unwrap();
    assert!(!a.rows.is_empty());
    assert!(a.rows.iter().all(|r| r.value == 1.0));
}

#[test]
fn two_tick_moves_half_the_time() {
    // returns alternate 0 and 2 ticks (4 half ticks)
    let changes: Vec<i64> = (0..102).map(|i| if i % 2 == 1 { 4 } else { 0 }).collect();
    let day = day_from_gaps(&[7; 102], &changes, Sign::Buy);
    let c = span_curves(&[day], 1, 1).unwrap();
    assert_eq!(c.amp_nonzero.rows[0].value, 4.0);
    assert_eq!(c.prob_nonzero.rows[0].value, 0.5);
    assert_eq!(c.variance.rows[0].value, 2.0);
}

#[test]
fn constant_impact() {
    // midpoint climbs half a tick per order, spread alternates 1 and 2
    let rows: Vec<_> = (0..50).map(|i| (i * 10 + i % 7, 2001 + i, 1 + i % 2, Sign::Buy)).collect();
    let day = day_from(&rows);
    let i1 = impact_cond(&[day], 1, 3).unwrap();
    assert!(i1.rows.iter().all(|r| r.value == 0.5));
}

#[test]
fn constant_spread() {
    let day = day_from(&(0..300).map(|i| (i * i, 1, 1, Sign::Sell)).collect::<Vec<_>>());
    let s = spread_cond(&[day], 10, 4).unwrap();
    assert!(s.rows.iter().all(|r| r.value == 1.0));
}

#[test]
fn spread_widens_with_activity() {
    // fast stretches (gap 10 ms) quote spread 2, slow ones (gap 1 s) spread 1
    let mut rows = Vec::new();
    let mut t = 0;
    for block in 0..40 {
        let fast = block % 2 == 0;
        for _ in 0..50 {
            t += if fast { 10 } else { 1000 };
            let spread = if fast { 2 } else { 1 };
            rows.push((t, 2000 + spread, spread, Sign::Buy));
        }
    }
    let s = spread_cond(&[day_from(&rows)], 10, 6).unwrap();
    let v = s.values();
    assert!(v.windows(2).all(|w| w[0] >= w[1]), "{v:?}");
    assert!(v[0] > v[v.len() - 1]);
    let rho = crate::stats::spearman(&s.centers(), &v).unwrap();
    assert!(rho < -0.8, "{rho}");
}

#[test]
fn fixed_window_exact_counts() {
    // four orders per 1 s window; moves +1 +1 -1 +1 ticks net 2 ticks per window
    let rows: Vec<_> = (0..=40)
        .scan(2001, |mid, k| {
            let row = (k * 250, *mid, 1, Sign::Buy);
            *mid += [2, 2, -2, 2][k as usize % 4];
            Some(row)
        })
        .collect();
    let mut day = day_from(&rows);
    day.session = Session::new(0, 10_000);
    let c = var_fixed_dt(&[day], 1000, 3).unwrap();
    assert_eq!(c.rows.len(), 1);
    assert_eq!(c.rows[0].count, 10);
    assert_eq!(c.rows[0].value, 1.0);
    assert_eq!(c.rows[0].center, 250.0);
}

fn random_day(rng: &mut ChaCha8Rng, n: usize, date_offset: u64) -> TradingDay {
    let mut t = 0;
    let mut mid: i64 = 2001;
    let rows: Vec<_> = (0..n)
        .map(|_| {
            t += rng.random_range(0..400);
            let row = (t, mid, 1, if rng.random_bool(0.5) { Sign::Buy } else { Sign::Sell });
            mid += 2 * rng.random_range(-2..=2);
            row
        })
        .collect();
    let mut d = day_from(&rows);
    d.day_id = d.day_id + chrono::Days::new(date_offset);
    d
}

#[test]
fn decomposition_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let days: Vec<_> = (0..4).map(|k| random_day(&mut rng, 3000, k)).collect();
    let c = span_curves(&days, 1, 20).unwrap();
    for v in &c.variance.rows {
        let p = c.prob_nonzero.row_for_bin(v.bin).unwrap();
        let a = c.amp_nonzero.row_for_bin(v.bin).unwrap();
        assert!(((p.value * a.value - v.value) / v.value).abs() < 1e-12);
    }
}

#[test]
fn merge_order_and_day_order_are_irrelevant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let days: Vec<_> = (0..5).map(|k| random_day(&mut rng, 2000, k)).collect();
    let forward = span_curves(&days, 3, 12).unwrap();
    let mut rev = days.clone();
    rev.reverse();
    let backward = span_curves(&rev, 3, 12).unwrap();
    assert_eq!(forward, backward);

    let terms = TradeSpanTerms::new(3);
    let spec = forward.spec.clone();
    let parts: Vec<_> = days.iter().map(|d| accumulate_day(d, &terms, &spec)).collect();
    let single = accumulate_with(&days, &terms, spec.clone()).bins;
    let mut shuffled = parts.clone();
    shuffled.swap(0, 4);
    shuffled.swap(1, 3);
    assert_eq!(merge_bins(shuffled, spec.n_bins()), single);
}

#[test]
fn removing_a_day_only_removes_its_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let days: Vec<_> = (0..4).map(|k| random_day(&mut rng, 1500, k)).collect();
    let spec = span_curves(&days, 1, 10).unwrap().spec;
    let terms = TradeSpanTerms::new(1);
    let all = accumulate_with(&days, &terms, spec.clone()).bins;
    let without = accumulate_with(&days[1..], &terms, spec.clone()).bins;
    let only = accumulate_day(&days[0], &terms, &spec);
    assert_eq!(merge_bins([without, only], spec.n_bins()), all);
}

#[test]
fn too_few_terms() {
    let day = day_from_gaps(&[1, 2, 3, 4], &[0; 4], Sign::Buy);
    assert!(var_fixed_n(&[day], 1, 5).is_err());
}

#[test]
fn spans_never_cross_days() {
    // two days of 5 orders: with n0 = 3 each day has exactly one term (i = 1)
    let a = day_from_gaps(&[1; 5], &[2; 5], Sign::Buy);
    let b = day_from_gaps(&[1; 5], &[-2; 5], Sign::Buy);
    let c = span_curves(&[a, b], 3, 1).unwrap();
    assert_eq!(c.variance.pooled_count, 2);
    assert_eq!(c.impact.pooled, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Bin edges depend only on durations: rewriting every midpoint leaves
    /// them unchanged.
    #[test]
    fn conditioning_ignores_returns(seed in 0u64..1000, shift in 1i64..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let day = random_day(&mut rng, 400, 0);
        let mut other = day.clone();
        for (k, o) in other.orders.iter_mut().enumerate() {
            o.bid += shift * (k as i64 % 3);
            o.ask += shift * (k as i64 % 3);
        }
        let a = span_curves(&[day], 1, 8).unwrap();
        let b = span_curves(&[compute_returns(other)], 1, 8).unwrap();
        prop_assert_eq!(a.spec, b.spec);
        prop_assert_eq!(a.variance.centers(), b.variance.centers());
    }
}
