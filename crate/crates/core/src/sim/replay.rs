use std::fmt;
use std::io::BufRead;

use serde::Serialize;

use crate::imbalance::TradeSign;
use crate::market_data::{
    BookState, EventKind, EventReader, Level1Event, SessionDescriptor, Timestamp,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// The line could not be parsed; checking stops here.
    Format(String),
    NonMonotonicTimestamp {
        previous: Timestamp,
    },
    OutOfSession,
    OneSidedQuote,
    /// Spread below one tick.
    CrossedQuote,
    OffTickQuote,
    ZeroSize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Zero-based index of the offending event.
    pub index: u64,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: {:?}", self.index, self.kind)
    }
}

/// Result of replaying a stream against the book consistency rules.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub events: u64,
    pub trades: u64,
    pub quotes: u64,
    pub buy_trades: u64,
    pub sell_trades: u64,
    pub inside_trades: u64,
    pub buy_volume: u64,
    pub sell_volume: u64,
    /// Buy-initiated trades per second of session.
    pub buy_rate: f64,
    pub sell_rate: f64,
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Checker<'a> {
    desc: &'a SessionDescriptor,
    book: BookState,
    last_ts: Option<Timestamp>,
    diag: Diagnostics,
}

impl<'a> Checker<'a> {
    fn new(desc: &'a SessionDescriptor) -> Self {
        Checker {
            desc,
            book: BookState::new(desc.tick()),
            last_ts: None,
            diag: Diagnostics::default(),
        }
    }

    fn violation(&mut self, kind: ViolationKind) {
        self.diag.violations.push(Violation {
            index: self.diag.events,
            kind,
        });
    }

    fn check(&mut self, e: &Level1Event) {
        if let Some(prev) = self.last_ts {
            if e.timestamp < prev {
                self.violation(ViolationKind::NonMonotonicTimestamp { previous: prev });
            }
        }
        self.last_ts = Some(e.timestamp);
        if !self.desc.contains(e.timestamp) {
            self.violation(ViolationKind::OutOfSession);
        }
        match e.kind {
            EventKind::Quote(q) => {
                self.diag.quotes += 1;
                let tick = self.desc.tick();
                match (q.bid, q.ask) {
                    (Some(b), Some(a)) => {
                        if b.size == 0 || a.size == 0 {
                            self.violation(ViolationKind::ZeroSize);
                        }
                        if !b.price.is_multiple_of(tick) || !a.price.is_multiple_of(tick) {
                            self.violation(ViolationKind::OffTickQuote);
                        }
                        if a.price.units() - b.price.units() < tick.units() {
                            self.violation(ViolationKind::CrossedQuote);
                        }
                    }
                    _ => self.violation(ViolationKind::OneSidedQuote),
                }
            }
            EventKind::Trade { price, size } => {
                self.diag.trades += 1;
                if size == 0 {
                    self.violation(ViolationKind::ZeroSize);
                }
                if let (true, Some(b), Some(a)) =
                    (self.book.is_two_sided(), self.book.bid(), self.book.ask())
                {
                    match TradeSign::from_prices(price, b.price, a.price) {
                        TradeSign::Buy => {
                            self.diag.buy_trades += 1;
                            self.diag.buy_volume += size;
                        }
                        TradeSign::Sell => {
                            self.diag.sell_trades += 1;
                            self.diag.sell_volume += size;
                        }
                        TradeSign::Inside => self.diag.inside_trades += 1,
                    }
                }
            }
        }
        self.book.apply(e);
        self.diag.events += 1;
    }

    fn finish(mut self) -> Diagnostics {
        let secs = (self.desc.session_end_ns - self.desc.session_start_ns) as f64 / 1e9;
        self.diag.buy_rate = self.diag.buy_trades as f64 / secs;
        self.diag.sell_rate = self.diag.sell_trades as f64 / secs;
        self.diag
    }
}

/// Checks an in-memory stream.
pub fn replay_check_events<'a, I>(events: I, desc: &SessionDescriptor) -> Diagnostics
where
    I: IntoIterator<Item = &'a Level1Event>,
{
    let mut checker = Checker::new(desc);
    for e in events {
        checker.check(e);
    }
    checker.finish()
}

/// Checks a tick file. Format errors end the replay with a violation.
pub fn replay_check<R: BufRead>(source: R, desc: &SessionDescriptor) -> Diagnostics {
    let mut checker = Checker::new(desc);
    for item in EventReader::new(source, desc.tick()).lenient_timestamps() {
        match item {
            Ok(e) => checker.check(&e),
            Err(err) => {
                checker.violation(ViolationKind::Format(err.to_string()));
                break;
            }
        }
    }
    checker.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{write_event_stream, Level};
    use crate::price::Price;
    use crate::sim::{generate_session, SimConfig};

    #[test]
    fn generated_stream_is_clean() {
        let mut cfg = SimConfig::baseline(2);
        cfg.session_seconds = 300.0;
        let (events, out) = generate_session(&cfg).unwrap();
        let diag = replay_check_events(&events, &out.descriptor);
        assert!(diag.is_clean(), "{:?}", diag.violations);
        assert_eq!(diag.events as usize, events.len());
        // both sides trade at roughly the configured rate
        assert!(diag.buy_rate > 0.3 && diag.sell_rate > 0.3);

        let text = write_event_stream(Vec::new(), &events, out.descriptor.tick()).unwrap();
        let from_file = replay_check(text.as_slice(), &out.descriptor);
        assert_eq!(from_file, diag);
    }

    #[test]
    fn injected_crossed_quote_is_reported_once() {
        let mut cfg = SimConfig::baseline(2);
        cfg.session_seconds = 60.0;
        let (mut events, out) = generate_session(&cfg).unwrap();
        let at = events.len() / 2;
        let t = events[at - 1].timestamp;
        events.insert(
            at,
            Level1Event::quote(
                t,
                Level::new(Price::from_f64(101.0), 5),
                Level::new(Price::from_f64(100.0), 5),
            ),
        );
        let diag = replay_check_events(&events, &out.descriptor);
        assert_eq!(
            diag.violations,
            vec![Violation {
                index: at as u64,
                kind: ViolationKind::CrossedQuote
            }]
        );
    }

    #[test]
    fn format_and_ordering_problems() {
        let desc = SessionDescriptor::new("X", Price::from_f64(0.01), 0, 100).unwrap();
        let text = "5,Q,,,1.00,1.01,1,1\n4,T,1.01,1,,,,\n6,Q,,,,1.01,,1\n7,Z,,,,,,\n";
        let diag = replay_check(text.as_bytes(), &desc);
        let kinds: Vec<_> = diag
            .violations
            .iter()
            .map(|v| (v.index, v.kind.clone()))
            .collect();
        assert_eq!(
            kinds[0],
            (1, ViolationKind::NonMonotonicTimestamp { previous: 5 })
        );
        assert_eq!(kinds[1], (2, ViolationKind::OneSidedQuote));
        assert!(matches!(kinds[2], (3, ViolationKind::Format(_))));
    }
}
