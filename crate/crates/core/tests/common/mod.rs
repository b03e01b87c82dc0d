//! Shared helpers for the integration tests: a deliberately naive episode
//! extractor, a random stream generator and closed-form regression formulas.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trade_imbalance::market_data::{EventKind, Level, Level1Event, SessionDescriptor};
use trade_imbalance::Price;

/// Episode as seen by the reference extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct RefEpisode {
    pub first_trade_ns: i64,
    pub last_trade_ns: i64,
    pub imbalance: i64,
    pub start_mid_x2: i64,
    pub post_mid_x2: i64,
    pub total_traded: u64,
    pub accepted: bool,
}

enum Item {
    Trade {
        t: i64,
        signed: i64,
        size: u64,
        mid_x2: i64,
    },
    Quote {
        mid_x2: i64,
    },
}

/// Keeps in-session trades printed on a valid book (with their signed size and
/// prevailing doubled mid) and the valid quotes. Everything else is dropped.
fn usable_items(events: &[Level1Event], desc: &SessionDescriptor) -> Vec<Item> {
    let tick = desc.tick().units();
    let mut bid: Option<Level> = None;
    let mut ask: Option<Level> = None;
    let mut items = Vec::new();
    let valid = |b: &Option<Level>, a: &Option<Level>| match (b, a) {
        (Some(b), Some(a)) if a.price.units() - b.price.units() >= tick => {
            Some((b.price.units(), a.price.units()))
        }
        _ => None,
    };
    for e in events {
        if e.timestamp < desc.session_start_ns || e.timestamp > desc.session_end_ns {
            continue;
        }
        match e.kind {
            EventKind::Quote(q) => {
                bid = q.bid;
                ask = q.ask;
                if let Some((b, a)) = valid(&bid, &ask) {
                    items.push(Item::Quote { mid_x2: a + b });
                }
            }
            EventKind::Trade { price, size } => {
                if let Some((b, a)) = valid(&bid, &ask) {
                    let p = price.units();
                    let sign = if p >= a {
                        1
                    } else if p <= b {
                        -1
                    } else {
                        0
                    };
                    items.push(Item::Trade {
                        t: e.timestamp,
                        signed: sign * size as i64,
                        size,
                        mid_x2: a + b,
                    });
                }
            }
        }
    }
    items
}

/// `(timestamp, signed size, size)` of every trade the extractor can use.
pub fn usable_trades(events: &[Level1Event], desc: &SessionDescriptor) -> Vec<(i64, i64, u64)> {
    usable_items(events, desc)
        .into_iter()
        .filter_map(|it| match it {
            Item::Trade {
                t, signed, size, ..
            } => Some((t, signed, size)),
            Item::Quote { .. } => None,
        })
        .collect()
}

/// Re-scanning reference: from each search start, prefix sums of signed
/// volume are recomputed until one reaches the target; the anchor is found by
/// walking back to the last trade where the running sum left zero or changed
/// sign. Episodes without a later valid quote are dropped.
pub fn reference_extract(
    events: &[Level1Event],
    desc: &SessionDescriptor,
    target: u64,
    overshoot_tol: f64,
) -> Vec<RefEpisode> {
    let items = usable_items(events, desc);
    let mut out = Vec::new();
    let mut start = 0;
    'search: while start < items.len() {
        // prefix sums over the trades from `start`
        let mut sums: Vec<(usize, i64)> = Vec::new();
        let mut c = 0i64;
        let mut end = None;
        for (k, item) in items.iter().enumerate().skip(start) {
            if let Item::Trade { signed, .. } = item {
                c += signed;
                sums.push((k, c));
                if c.unsigned_abs() >= target {
                    end = Some(sums.len() - 1);
                    break;
                }
            }
        }
        let Some(j) = end else { break 'search };

        let mut anchor = 0;
        for i in (0..=j).rev() {
            let prev = if i == 0 { 0 } else { sums[i - 1].1 };
            let cur = sums[i].1;
            let moved = match items[sums[i].0] {
                Item::Trade { signed, .. } => signed != 0,
                _ => unreachable!(),
            };
            if moved && cur != 0 && (prev == 0 || prev.signum() != cur.signum()) {
                anchor = i;
                break;
            }
        }

        let (a_idx, j_idx) = (sums[anchor].0, sums[j].0);
        let total: u64 = items[a_idx..=j_idx]
            .iter()
            .map(|it| match it {
                Item::Trade { size, .. } => *size,
                Item::Quote { .. } => 0,
            })
            .sum();
        let Item::Trade {
            t: t0, mid_x2: p0, ..
        } = items[a_idx]
        else {
            unreachable!()
        };
        let Item::Trade { t: t1, .. } = items[j_idx] else {
            unreachable!()
        };
        let imbalance = sums[j].1;

        let Some((q_idx, post)) = items
            .iter()
            .enumerate()
            .skip(j_idx + 1)
            .find_map(|(k, it)| match it {
                Item::Quote { mid_x2 } => Some((k, *mid_x2)),
                _ => None,
            })
        else {
            break 'search;
        };
        let over = (imbalance.unsigned_abs() as f64 - target as f64) / target as f64;
        out.push(RefEpisode {
            first_trade_ns: t0,
            last_trade_ns: t1,
            imbalance,
            start_mid_x2: p0,
            post_mid_x2: post,
            total_traded: total,
            accepted: over <= overshoot_tol,
        });
        start = q_idx + 1;
    }
    out
}

pub fn descriptor(end_ns: i64) -> SessionDescriptor {
    SessionDescriptor::new("RND", Price::from_f64(0.01), 0, end_ns).unwrap()
}

/// Random Level-1 stream on a 0.01 grid around 100. Mixes touch, inside and
/// through-the-book trades, crossed, locked and one-sided quotes, repeated
/// timestamps and a few events outside the session `[0, 10_000]`.
pub fn random_stream(seed: u64, max_len: usize) -> Vec<Level1Event> {
    random_stream_with(seed, max_len, true)
}

/// As [`random_stream`]; without `ties` every event gets its own timestamp.
pub fn random_stream_with(seed: u64, max_len: usize, ties: bool) -> Vec<Level1Event> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=max_len);
    let tick = 10_000_000i64; // 0.01 in fixed-point units
    let mut mid_ticks: i64 = 10_000;
    let mut t: i64 = rng.gen_range(-20..5);
    let mut bid = mid_ticks;
    let mut ask = mid_ticks + 1;
    let mut events = Vec::with_capacity(n);
    for _ in 0..n {
        t += if ties && rng.gen_bool(0.3) {
            0
        } else {
            rng.gen_range(1..60)
        };
        if rng.gen_bool(0.45) {
            mid_ticks += rng.gen_range(-2..=2);
            bid = mid_ticks - rng.gen_range(0..2);
            ask = bid + rng.gen_range(1..4);
            let r: f64 = rng.gen();
            if r < 0.05 {
                std::mem::swap(&mut bid, &mut ask); // crossed
            } else if r < 0.08 {
                ask = bid; // locked
            }
            let level = |p: i64, rng: &mut ChaCha8Rng| {
                Level::new(Price::from_units(p * tick), rng.gen_range(1..30))
            };
            let b = level(bid, &mut rng);
            let a = level(ask, &mut rng);
            let e = match rng.gen_range(0..40) {
                0 => Level1Event::partial_quote(t, Some(b), None),
                1 => Level1Event::partial_quote(t, None, Some(a)),
                _ => Level1Event::quote(t, b, a),
            };
            events.push(e);
        } else {
            let price = match rng.gen_range(0..10) {
                0 => (bid + ask) * tick / 2 + rng.gen_range(0..3) * 1_000_000, // possibly inside
                1 => (ask + 1) * tick,
                2 => (bid - 1) * tick,
                3..=5 => ask * tick,
                _ => bid * tick,
            };
            let size = if rng.gen_bool(0.1) {
                rng.gen_range(10..40)
            } else {
                rng.gen_range(1..8)
            };
            events.push(Level1Event::trade(t, Price::from_units(price), size));
        }
    }
    events
}

/// Slope and intercept from the 2x2 normal equations
/// [n Σx; Σx Σx²][a; b] = [Σy; Σxy], solved by Cramer's rule.
pub fn normal_equations(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let slope = (n * sxy - sx * sy) / det;
    (intercept, slope)
}

/// R² as 1 - SSE/SST.
pub fn r_squared(x: &[f64], y: &[f64], intercept: f64, slope: f64) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let sst: f64 = y.iter().map(|b| (b - mean).powi(2)).sum();
    1.0 - sse / sst
}

/// Two-sided p-value of the slope t-test via the regularized incomplete beta
/// function: P(|T| > t) = I_{df/(df+t²)}(df/2, 1/2).
pub fn slope_p_value(x: &[f64], y: &[f64], intercept: f64, slope: f64) -> f64 {
    let n = x.len() as f64;
    let df = n - 2.0;
    let mean_x = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mean_x).powi(2)).sum();
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = (sse / df / sxx).sqrt();
    let t = slope / se;
    statrs::function::beta::beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}
