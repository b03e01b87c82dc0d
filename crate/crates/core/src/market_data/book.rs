use super::event::{EventKind, Level, Level1Event, Timestamp};
use crate::price::Price;

/// Last trade seen by the book.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LastTrade {
    pub timestamp: Timestamp,
    pub price: Price,
    pub size: u64,
}

/// Top of book as reconstructed from a Level-1 stream.
///
/// Quotes replace both sides wholesale. Trades never touch the quote fields;
/// the feed reports the post-trade book as a separate quote event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BookState {
    tick: Price,
    bid: Option<Level>,
    ask: Option<Level>,
    last_quote_time: Option<Timestamp>,
    last_trade: Option<LastTrade>,
}

impl BookState {
    pub fn new(tick: Price) -> Self {
        BookState {
            tick,
            bid: None,
            ask: None,
            last_quote_time: None,
            last_trade: None,
        }
    }

    pub fn apply(&mut self, event: &Level1Event) {
        match event.kind {
            EventKind::Quote(q) => {
                self.bid = q.bid;
                self.ask = q.ask;
                self.last_quote_time = Some(event.timestamp);
            }
            EventKind::Trade { price, size } => {
                self.last_trade = Some(LastTrade {
                    timestamp: event.timestamp,
                    price,
                    size,
                });
            }
        }
    }

    pub fn tick_size(&self) -> Price {
        self.tick
    }

    pub fn bid(&self) -> Option<Level> {
        self.bid
    }

    pub fn ask(&self) -> Option<Level> {
        self.ask
    }

    pub fn last_quote_time(&self) -> Option<Timestamp> {
        self.last_quote_time
    }

    pub fn last_trade(&self) -> Option<LastTrade> {
        self.last_trade
    }

    /// Both sides present and the spread is at least one tick.
    pub fn is_two_sided(&self) -> bool {
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => a.price.units() - b.price.units() >= self.tick.units(),
            _ => false,
        }
    }

    /// Twice the mid-price, in fixed-point units. Exact for any pair of prices.
    pub fn mid_x2(&self) -> Option<i64> {
        if !self.is_two_sided() {
            return None;
        }
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => Some(b.price.units() + a.price.units()),
            _ => None,
        }
    }

    pub fn mid_price(&self) -> Option<f64> {
        self.mid_x2().map(half_price_to_f64)
    }

    pub fn spread(&self) -> Option<Price> {
        match (self.bid, self.ask) {
            (Some(b), Some(a)) => Some(Price(a.price.units() - b.price.units())),
            _ => None,
        }
    }
}

/// Functional form of [`BookState::apply`].
pub fn apply_event(mut state: BookState, event: &Level1Event) -> BookState {
    state.apply(event);
    state
}

/// Converts a doubled fixed-point price back to currency units.
pub fn half_price_to_f64(x2: i64) -> f64 {
    x2 as f64 / (2 * crate::price::PRICE_SCALE) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Price {
        s.parse().unwrap()
    }

    fn book(bid: &str, ask: &str) -> BookState {
        let mut b = BookState::new(p("0.01"));
        b.apply(&Level1Event::quote(
            0,
            Level::new(p(bid), 10),
            Level::new(p(ask), 10),
        ));
        b
    }

    #[test]
    fn mid_is_arithmetic_mean() {
        let b = book("100.00", "100.01");
        assert_eq!(b.mid_x2(), Some(p("100.00").units() + p("100.01").units()));
        assert!((b.mid_price().unwrap() - 100.005).abs() < 1e-12);

        let b = apply_event(
            b,
            &Level1Event::quote(1, Level::new(p("100.01"), 3), Level::new(p("100.02"), 4)),
        );
        assert!((b.mid_price().unwrap() - 100.015).abs() < 1e-12);
        assert_eq!(b.last_quote_time(), Some(1));
    }

    #[test]
    fn trade_leaves_quote_untouched() {
        let before = book("100.00", "100.01");
        let after = apply_event(before, &Level1Event::trade(5, p("100.01"), 3));
        assert_eq!(after.bid(), before.bid());
        assert_eq!(after.ask(), before.ask());
        assert_eq!(after.mid_x2(), before.mid_x2());
        assert_eq!(after.last_trade().unwrap().size, 3);
    }

    #[test]
    fn crossed_locked_and_one_sided_books_have_no_mid() {
        assert_eq!(book("100.01", "100.01").mid_x2(), None);
        assert_eq!(book("100.02", "100.01").mid_x2(), None);
        let mut b = BookState::new(p("0.01"));
        b.apply(&Level1Event::partial_quote(
            0,
            None,
            Some(Level::new(p("1.00"), 1)),
        ));
        assert!(!b.is_two_sided());
        assert_eq!(b.mid_price(), None);
    }
}
