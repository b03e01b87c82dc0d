mod common;

use proptest::prelude::*;

use common::{normal_equations, r_squared, rel_diff};
use trade_imbalance::imbalance::{Direction, EpisodeRecord};
use trade_imbalance::stats::quantile::{quantile_sorted, quartiles_sorted};
use trade_imbalance::stats::{
    aggregate_bins, estimate_impact, fit_linear, fit_linear_with, read_bins_csv, write_bins_csv,
    FitPoint, Weighting,
};

fn points() -> impl Strategy<Value = Vec<FitPoint>> {
    prop::collection::vec((0.0f64..10.0, -5.0f64..5.0, 1usize..500), 3..25)
        .prop_map(|v| {
            v.into_iter()
                .map(|(v, m, n)| FitPoint {
                    v,
                    mean_impact: m,
                    n,
                })
                .collect()
        })
        .prop_filter("needs distinct volumes", |p: &Vec<FitPoint>| {
            p.iter().any(|q| (q.v - p[0].v).abs() > 1e-3)
        })
}

/// Sort-and-interpolate written out longhand: position h = (n-1)p between
/// order statistics floor(h) and floor(h)+1.
fn naive_quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

proptest! {
    #[test]
    fn residuals_are_orthogonal_to_the_design(points in points()) {
        let fit = fit_linear(&points).unwrap();
        let residuals: Vec<f64> = points.iter().map(|p| p.mean_impact - fit.predict(p.v)).collect();
        let scale: f64 = points.iter().map(|p| p.mean_impact.abs() * (1.0 + p.v)).sum::<f64>() + 1.0;
        let sum: f64 = residuals.iter().sum();
        let cross: f64 = residuals.iter().zip(&points).map(|(r, p)| r * p.v).sum();
        prop_assert!(sum.abs() <= 1e-9 * scale, "{}", sum);
        prop_assert!(cross.abs() <= 1e-9 * scale, "{}", cross);
    }

    #[test]
    fn r_squared_routes_agree(points in points()) {
        let fit = fit_linear(&points).unwrap();
        let x: Vec<f64> = points.iter().map(|p| p.v).collect();
        let y: Vec<f64> = points.iter().map(|p| p.mean_impact).collect();
        let (mu, lambda) = normal_equations(&x, &y);
        prop_assert!(rel_diff(fit.intercept, mu) <= 1e-9 || (fit.intercept - mu).abs() <= 1e-12);
        prop_assert!(rel_diff(fit.slope, lambda) <= 1e-9 || (fit.slope - lambda).abs() <= 1e-12);
        let sse_route = r_squared(&x, &y, fit.intercept, fit.slope);
        prop_assert!((fit.r_squared - sse_route).abs() <= 1e-10);
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        prop_assert!((0.0..=1.0).contains(&fit.p_value));
    }

    #[test]
    fn rescaling_volume_rescales_only_the_slope(points in points(), c in 0.05f64..20.0, weighted in any::<bool>()) {
        let w = if weighted { Weighting::ByCount } else { Weighting::Unweighted };
        let base = fit_linear_with(&points, w).unwrap();
        let scaled: Vec<FitPoint> = points.iter().map(|p| FitPoint { v: p.v * c, ..*p }).collect();
        let s = fit_linear_with(&scaled, w).unwrap();
        let close = |a: f64, b: f64| rel_diff(a, b) <= 1e-9 || (a - b).abs() <= 1e-12;
        prop_assert!(close(s.slope * c, base.slope));
        prop_assert!(close(s.intercept, base.intercept));
        prop_assert!(close(s.r_squared, base.r_squared));
        prop_assert!(close(s.p_value, base.p_value));
    }

    #[test]
    fn quantiles_match_naive_reference(values in prop::collection::vec(-1e3f64..1e3, 1..200), p in 0.0f64..=1.0) {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = quantile_sorted(&sorted, p).unwrap();
        prop_assert!((got - naive_quantile(&values, p)).abs() <= 1e-9);
        let q = quartiles_sorted(&sorted).unwrap();
        prop_assert!(q.q1 <= q.median && q.median <= q.q3);
        prop_assert!((q.q1 - naive_quantile(&values, 0.25)).abs() <= 1e-9);
        prop_assert!((q.q3 - naive_quantile(&values, 0.75)).abs() <= 1e-9);
    }

    #[test]
    fn estimator_is_linear(a in 0.0f64..1e6, b in 0.0f64..1e6) {
        prop_assert_eq!(estimate_impact(a + b), estimate_impact(a) + estimate_impact(b));
    }

    #[test]
    fn bin_invariants(impacts in prop::collection::vec((-8i64..12, 0i64..5_000_000_000, 1u64..50), 1..120)) {
        let records: Vec<EpisodeRecord> = impacts
            .iter()
            .enumerate()
            .map(|(i, &(half, dur, extra))| EpisodeRecord {
                v: if i % 2 == 0 { 1.0 } else { 2.0 },
                target: if i % 2 == 0 { 10 } else { 20 },
                direction: Direction::Buy,
                imbalance: 10,
                impact_ticks: half as f64 / 2.0,
                duration_ns: dur,
                total_traded: 10 + extra,
                participation: 10.0 / (10 + extra) as f64,
                accepted: i % 7 != 3,
            })
            .collect();
        let bins = aggregate_bins(&records, 30);
        let accepted = records.iter().filter(|r| r.accepted).count();
        prop_assert_eq!(bins.iter().map(|b| b.n).sum::<usize>(), accepted);
        for b in &bins {
            prop_assert!(b.q1 <= b.median && b.median <= b.q3);
            prop_assert!(b.sd_impact >= 0.0);
            prop_assert_eq!(b.histogram.values().sum::<u64>() as usize, b.n);
            prop_assert_eq!(b.low_count, b.n < 30);
            prop_assert!(b.mean_duration_trimmed_s <= b.mean_duration_s + 1e-12);
            prop_assert!((0.0..=1.0).contains(&b.zero_time_fraction));
        }
        let mut buf = Vec::new();
        write_bins_csv(&mut buf, &bins).unwrap();
        prop_assert_eq!(read_bins_csv(buf.as_slice()).unwrap(), bins);
    }
}

#[test]
fn five_fixed_points_against_hand_solution() {
    // x = 1..5, y = 0.6, 1.1, 1.4, 2.1, 2.4:
    // Σx = 15, Σx² = 55, Σy = 7.6, Σxy = 27.4, det = 5·55 − 15² = 50
    // λ = (5·27.4 − 15·7.6)/50 = 0.46, μ = (7.6·55 − 15·27.4)/50 = 0.14
    let y = [0.6, 1.1, 1.4, 2.1, 2.4];
    let points: Vec<FitPoint> = y
        .iter()
        .enumerate()
        .map(|(i, &m)| FitPoint {
            v: (i + 1) as f64,
            mean_impact: m,
            n: 100,
        })
        .collect();
    let fit = fit_linear(&points).unwrap();
    assert!(rel_diff(fit.slope, 0.46) <= 1e-10);
    assert!(rel_diff(fit.intercept, 0.14) <= 1e-10);
    // residuals 0, 0.04, −0.12, 0.12, −0.04 → SSE 0.032; mean 1.52, SST = 2.148
    assert!(rel_diff(fit.r_squared, 1.0 - 0.032 / 2.148) <= 1e-10);
}
