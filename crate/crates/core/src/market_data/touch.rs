use thiserror::Error;

use super::book::BookState;
use super::event::{EventKind, Level1Event, Timestamp};
use super::session::SessionDescriptor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TouchError {
    #[error("session contains no two-sided quote")]
    EmptySession,
}

/// Streaming time-weighted average of the symmetric touch size
/// `(bid_size + ask_size) / 2`.
///
/// Each valid quote opens an interval that lasts until the next quote; the
/// last interval runs to the session end. Intervals with a one-sided or
/// crossed book carry no weight and are counted in `skipped_quotes`.
#[derive(Debug, Clone)]
pub struct TouchAccumulator {
    book: BookState,
    session_start: Timestamp,
    session_end: Timestamp,
    // (bid_size + ask_size) and the time it took effect
    current: Option<(u64, Timestamp)>,
    weighted_sum: u128,
    total_ns: u128,
    last_valid: Option<u64>,
    quotes: u64,
    skipped_quotes: u64,
}

impl TouchAccumulator {
    pub fn new(desc: &SessionDescriptor) -> Self {
        TouchAccumulator {
            book: BookState::new(desc.tick()),
            session_start: desc.session_start_ns,
            session_end: desc.session_end_ns,
            current: None,
            weighted_sum: 0,
            total_ns: 0,
            last_valid: None,
            quotes: 0,
            skipped_quotes: 0,
        }
    }

    pub fn observe(&mut self, event: &Level1Event) {
        if event.timestamp > self.session_end {
            return;
        }
        if let EventKind::Quote(_) = event.kind {
            let t = event.timestamp.max(self.session_start);
            self.close_interval(t);
            self.book.apply(event);
            self.quotes += 1;
            if self.book.is_two_sided() {
                let sum =
                    self.book.bid().map_or(0, |l| l.size) + self.book.ask().map_or(0, |l| l.size);
                self.current = Some((sum, t));
                self.last_valid = Some(sum);
            } else {
                self.current = None;
                self.skipped_quotes += 1;
            }
        }
    }

    fn close_interval(&mut self, t: Timestamp) {
        if let Some((sum, since)) = self.current {
            let dt = (t - since).max(0) as u128;
            self.weighted_sum += sum as u128 * dt;
            self.total_ns += dt;
        }
    }

    pub fn quotes_seen(&self) -> u64 {
        self.quotes
    }

    pub fn skipped_quotes(&self) -> u64 {
        self.skipped_quotes
    }

    /// Closes the final interval at the session end and returns ⟨V_Touch⟩.
    pub fn finish(mut self) -> Result<f64, TouchError> {
        self.close_interval(self.session_end);
        if self.total_ns == 0 {
            // every valid quote sits on the session end; use the last one as is
            return self
                .last_valid
                .map(|s| s as f64 / 2.0)
                .ok_or(TouchError::EmptySession);
        }
        Ok(self.weighted_sum as f64 / (2.0 * self.total_ns as f64))
    }
}

/// Time-weighted symmetric touch volume of a whole session.
pub fn time_weighted_touch<'a, I>(events: I, desc: &SessionDescriptor) -> Result<f64, TouchError>
where
    I: IntoIterator<Item = &'a Level1Event>,
{
    let mut acc = TouchAccumulator::new(desc);
    for e in events {
        acc.observe(e);
    }
    acc.finish()
}
