mod common;

use proptest::prelude::*;

use trade_imbalance::market_data::{
    apply_event, parse_event_stream, time_weighted_touch, write_event_stream, BookState, EventKind,
    Level, Level1Event, SessionDescriptor, TouchAccumulator,
};
use trade_imbalance::Price;

const TICKS: [&str; 6] = ["0.01", "0.25", "0.015625", "0.001", "0.5", "5"];

/// Quote stream on an arbitrary tick grid: (gap, bid in ticks, spread in
/// ticks, bid size, ask size). Spreads of 0 or below give invalid books.
fn quote_stream(tick: Price, rows: &[(i64, i64, i64, u64, u64)]) -> Vec<Level1Event> {
    let mut t = 0;
    rows.iter()
        .map(|&(gap, bid, spread, bs, asz)| {
            t += gap;
            let p = |k: i64| Price::from_units(k * tick.units());
            Level1Event::quote(t, Level::new(p(bid), bs), Level::new(p(bid + spread), asz))
        })
        .collect()
}

fn rows() -> impl Strategy<Value = Vec<(i64, i64, i64, u64, u64)>> {
    prop::collection::vec(
        (0i64..1000, 100i64..200, -1i64..5, 1u64..500, 1u64..500),
        1..80,
    )
}

proptest! {
    #[test]
    fn touch_lies_between_extreme_quotes(tick_idx in 0usize..TICKS.len(), rows in rows(), tail in 1i64..1000) {
        let tick: Price = TICKS[tick_idx].parse().unwrap();
        let events = quote_stream(tick, &rows);
        let end = events.last().unwrap().timestamp + tail;
        let desc = SessionDescriptor::new("X", tick, 0, end).unwrap();
        let valid: Vec<f64> = rows
            .iter()
            .filter(|r| r.2 >= 1)
            .map(|r| (r.3 + r.4) as f64 / 2.0)
            .collect();
        match time_weighted_touch(&events, &desc) {
            Ok(touch) => {
                let lo = valid.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = valid.iter().copied().fold(0.0, f64::max);
                prop_assert!(touch >= lo - 1e-9 && touch <= hi + 1e-9, "{} not in [{}, {}]", touch, lo, hi);
            }
            Err(_) => prop_assert!(valid.is_empty()),
        }
    }

    #[test]
    fn every_mid_is_a_multiple_of_half_a_tick(tick_idx in 0usize..TICKS.len(), rows in rows()) {
        let tick: Price = TICKS[tick_idx].parse().unwrap();
        let delta = tick.to_f64();
        let mut book = BookState::new(tick);
        for e in quote_stream(tick, &rows) {
            book.apply(&e);
            if let Some(mid) = book.mid_price() {
                let halves = mid / (delta / 2.0);
                prop_assert!((halves - halves.round()).abs() * delta / 2.0 <= delta * 1e-6);
            }
        }
    }

    #[test]
    fn chunked_folds_agree(seed in any::<u64>(), cuts in prop::collection::vec(0usize..500, 0..6)) {
        let events = common::random_stream(seed, 500);
        let desc = common::descriptor(10_000);
        let tick = desc.tick();

        let whole = events.iter().fold(BookState::new(tick), apply_event);
        let mut bounds: Vec<usize> = cuts.into_iter().map(|c| c.min(events.len())).collect();
        bounds.push(0);
        bounds.push(events.len());
        bounds.sort_unstable();
        let mut state = BookState::new(tick);
        let mut touch = TouchAccumulator::new(&desc);
        for w in bounds.windows(2) {
            let chunk = &events[w[0]..w[1]];
            state = chunk.iter().fold(state, apply_event);
            for e in chunk {
                touch.observe(e);
            }
        }
        prop_assert_eq!(state, whole);
        prop_assert_eq!(touch.finish().ok(), time_weighted_touch(&events, &desc).ok());

        // parsing the file in line-aligned pieces gives the same events
        let text = String::from_utf8(write_event_stream(Vec::new(), &events, tick).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut parsed = Vec::new();
        for piece in lines.chunks(37) {
            parsed.extend(parse_event_stream(piece.join("\n").as_bytes(), tick).unwrap());
        }
        prop_assert_eq!(parsed, events);
    }

    #[test]
    fn canonical_files_round_trip(seed in any::<u64>(), pad in prop::collection::vec(0usize..3, 500)) {
        let events = common::random_stream(seed, 500);
        let tick = Price::from_f64(0.01);
        let text = write_event_stream(Vec::new(), &events, tick).unwrap();
        let parsed = parse_event_stream(text.as_slice(), tick).unwrap();
        prop_assert_eq!(&parsed, &events);
        prop_assert_eq!(write_event_stream(Vec::new(), &parsed, tick).unwrap(), text.clone());

        // trailing whitespace is not significant
        let text = String::from_utf8(text).unwrap();
        let padded: String = text
            .lines()
            .zip(pad.iter().cycle())
            .map(|(l, &n)| format!("{l}{}\n", [" ", "\t", " \r"][n]))
            .collect();
        let reparsed = parse_event_stream(padded.as_bytes(), tick).unwrap();
        prop_assert_eq!(write_event_stream(Vec::new(), &reparsed, tick).unwrap(), text.into_bytes());
    }
}

#[test]
fn trades_and_quotes_survive_a_round_trip_with_fractional_ticks() {
    let tick: Price = "0.015625".parse().unwrap();
    let text = "timestamp_ns,kind,trade_price,trade_size,bid_price,ask_price,bid_size,ask_size\n\
                1,Q,,,125.015625,125.031250,1888,1900\n\
                2,T,125.031250,3,,,,\n\
                3,Q,,,,125.031250,,7\n";
    let events = parse_event_stream(text.as_bytes(), tick).unwrap();
    assert_eq!(events.len(), 3);
    assert!(matches!(events[2].kind, EventKind::Quote(q) if q.bid.is_none()));
    let out = write_event_stream(Vec::new(), &events, tick).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), text);
}
