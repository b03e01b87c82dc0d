use crate::price::Price;

/// Nanoseconds since the session epoch.
pub type Timestamp = i64;

/// One side of the top of book.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub price: Price,
    pub size: u64,
}

impl Level {
    pub fn new(price: Price, size: u64) -> Self {
        Level { price, size }
    }
}

/// Best bid/offer snapshot. A missing side means that side of the book is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quote {
    pub bid: Option<Level>,
    pub ask: Option<Level>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Trade { price: Price, size: u64 },
    Quote(Quote),
}

/// A single Level-1 tick: a trade print or a best bid/offer update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level1Event {
    pub timestamp: Timestamp,
    pub kind: EventKind,
}

impl Level1Event {
    pub fn trade(timestamp: Timestamp, price: Price, size: u64) -> Self {
        Level1Event {
            timestamp,
            kind: EventKind::Trade { price, size },
        }
    }

    pub fn quote(timestamp: Timestamp, bid: Level, ask: Level) -> Self {
        Level1Event {
            timestamp,
            kind: EventKind::Quote(Quote {
                bid: Some(bid),
                ask: Some(ask),
            }),
        }
    }

    pub fn partial_quote(timestamp: Timestamp, bid: Option<Level>, ask: Option<Level>) -> Self {
        Level1Event {
            timestamp,
            kind: EventKind::Quote(Quote { bid, ask }),
        }
    }

    pub fn is_trade(&self) -> bool {
        matches!(self.kind, EventKind::Trade { .. })
    }

    /// Reflects every price about `center`, swapping bid and ask.
    ///
    /// A buy-side trade becomes a sell-side trade of the same size and every
    /// mid-price move changes sign.
    pub fn mirrored(&self, center: Price) -> Level1Event {
        let reflect = |p: Price| Price(2 * center.0 - p.0);
        let kind = match self.kind {
            EventKind::Trade { price, size } => EventKind::Trade {
                price: reflect(price),
                size,
            },
            EventKind::Quote(q) => EventKind::Quote(Quote {
                bid: q.ask.map(|l| Level::new(reflect(l.price), l.size)),
                ask: q.bid.map(|l| Level::new(reflect(l.price), l.size)),
            }),
        };
        Level1Event {
            timestamp: self.timestamp,
            kind,
        }
    }
}
