//! Per-target trade-imbalance state machine.
//!
//! The machine starts in equilibrium with V_I = 0. Every signed trade adds
//! `ε·size` to V_I. The episode is anchored (P_0, first trade time, window
//! volume) at the trade that moves V_I away from zero. A trade that flips the
//! sign of V_I re-anchors at itself and keeps the remainder; a trade that lands
//! exactly on zero returns to equilibrium. Once |V_I| ≥ V_T the count stops and
//! the machine waits for the next valid quote, whose mid is P_post. Trades
//! arriving while it waits belong to no episode.

use super::episode::{overshoot, Direction, ImbalanceEpisode};
use crate::market_data::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Equilibrium,
    Accumulating,
    AwaitingQuote,
}

#[derive(Debug, Clone)]
pub(crate) struct EpisodeMachine {
    target: u64,
    phase: Phase,
    imbalance: i64,
    anchor_mid_x2: i64,
    first_trade_ns: Timestamp,
    last_trade_ns: Timestamp,
    total_traded: u64,
    // mid when the terminating trade printed, used when no post quote is required
    terminal_mid_x2: i64,
}

impl EpisodeMachine {
    pub(crate) fn new(target: u64) -> Self {
        debug_assert!(target >= 1);
        EpisodeMachine {
            target,
            phase: Phase::Equilibrium,
            imbalance: 0,
            anchor_mid_x2: 0,
            first_trade_ns: 0,
            last_trade_ns: 0,
            total_traded: 0,
            terminal_mid_x2: 0,
        }
    }

    pub(crate) fn target(&self) -> u64 {
        self.target
    }

    pub(crate) fn is_waiting(&self) -> bool {
        self.phase == Phase::AwaitingQuote
    }

    #[inline]
    fn anchor(&mut self, mid_x2: i64, t: Timestamp, size: u64) {
        self.anchor_mid_x2 = mid_x2;
        self.first_trade_ns = t;
        self.total_traded = size;
    }

    /// Feeds a trade with sign `sign` ∈ {-1, 0, 1}; `mid_x2` is the mid
    /// prevailing just before the trade.
    #[inline]
    pub(crate) fn on_trade(&mut self, sign: i64, size: u64, mid_x2: i64, t: Timestamp) {
        match self.phase {
            Phase::AwaitingQuote => return,
            Phase::Equilibrium => {
                if sign == 0 {
                    return;
                }
                self.anchor(mid_x2, t, size);
                self.imbalance = sign * size as i64;
                self.phase = Phase::Accumulating;
            }
            Phase::Accumulating => {
                self.total_traded += size;
                if sign == 0 {
                    return;
                }
                let next = self.imbalance + sign * size as i64;
                if next == 0 {
                    self.imbalance = 0;
                    self.phase = Phase::Equilibrium;
                    return;
                }
                if next.signum() != self.imbalance.signum() {
                    self.anchor(mid_x2, t, size);
                }
                self.imbalance = next;
            }
        }
        if self.imbalance.unsigned_abs() >= self.target {
            self.last_trade_ns = t;
            self.terminal_mid_x2 = mid_x2;
            self.phase = Phase::AwaitingQuote;
        }
    }

    /// Feeds a valid quote. Returns the finished episode if one was waiting.
    #[inline]
    pub(crate) fn on_quote(
        &mut self,
        mid_x2: i64,
        tick_units: i64,
        overshoot_tol: f64,
    ) -> Option<ImbalanceEpisode> {
        if self.phase != Phase::AwaitingQuote {
            return None;
        }
        Some(self.complete(mid_x2, tick_units, overshoot_tol))
    }

    /// Closes a waiting episode at the mid of its terminating trade.
    pub(crate) fn complete_without_quote(
        &mut self,
        tick_units: i64,
        overshoot_tol: f64,
    ) -> Option<ImbalanceEpisode> {
        if self.phase != Phase::AwaitingQuote {
            return None;
        }
        Some(self.complete(self.terminal_mid_x2, tick_units, overshoot_tol))
    }

    fn complete(
        &mut self,
        post_mid_x2: i64,
        tick_units: i64,
        overshoot_tol: f64,
    ) -> ImbalanceEpisode {
        let direction = Direction::of(self.imbalance);
        let move_x2 = direction.sign() * (post_mid_x2 - self.anchor_mid_x2);
        let episode = ImbalanceEpisode {
            target: self.target,
            direction,
            imbalance: self.imbalance,
            start_mid_x2: self.anchor_mid_x2,
            post_mid_x2,
            impact_ticks: move_x2 as f64 / (2 * tick_units) as f64,
            first_trade_ns: self.first_trade_ns,
            last_trade_ns: self.last_trade_ns,
            total_traded: self.total_traded,
            accepted: overshoot(self.imbalance, self.target) <= overshoot_tol,
        };
        self.phase = Phase::Equilibrium;
        self.imbalance = 0;
        episode
    }
}
