use thiserror::Error;

use crate::market_data::BookState;
use crate::price::Price;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no two-sided quote before the trade")]
pub struct NoQuoteYet;

/// Aggressor side inferred from the trade price against the prevailing quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TradeSign {
    Buy,
    Sell,
    Inside,
}

impl TradeSign {
    /// +1 for a trade at or above the ask, -1 at or below the bid, 0 otherwise.
    pub fn value(self) -> i64 {
        match self {
            TradeSign::Buy => 1,
            TradeSign::Sell => -1,
            TradeSign::Inside => 0,
        }
    }

    /// Classification against raw bid/ask prices.
    #[inline]
    pub fn from_prices(price: Price, bid: Price, ask: Price) -> TradeSign {
        if price >= ask {
            TradeSign::Buy
        } else if price <= bid {
            TradeSign::Sell
        } else {
            TradeSign::Inside
        }
    }
}

/// Signs a trade against the book state immediately preceding it.
pub fn classify_trade(price: Price, book: &BookState) -> Result<TradeSign, NoQuoteYet> {
    match (book.bid(), book.ask()) {
        (Some(bid), Some(ask)) if book.is_two_sided() => {
            Ok(TradeSign::from_prices(price, bid.price, ask.price))
        }
        _ => Err(NoQuoteYet),
    }
}
