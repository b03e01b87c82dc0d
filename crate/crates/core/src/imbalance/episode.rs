use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::book::half_price_to_f64;
use crate::market_data::Timestamp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Buy,
    Sell,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Buy => 1,
            Direction::Sell => -1,
        }
    }

    pub fn of(imbalance: i64) -> Direction {
        if imbalance >= 0 {
            Direction::Buy
        } else {
            Direction::Sell
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Buy => Direction::Sell,
            Direction::Sell => Direction::Buy,
        }
    }
}

/// One completed run of the trade-imbalance state machine.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceEpisode {
    /// Target volume V_T in contracts.
    pub target: u64,
    pub direction: Direction,
    /// Signed trade imbalance V_I at termination.
    pub imbalance: i64,
    /// Twice the mid-price at the episode anchor (P_0), fixed-point units.
    pub start_mid_x2: i64,
    /// Twice the mid-price of the first quote after the terminating trade.
    pub post_mid_x2: i64,
    /// Direction-adjusted impact in ticks; always a multiple of one half.
    pub impact_ticks: f64,
    pub first_trade_ns: Timestamp,
    pub last_trade_ns: Timestamp,
    /// Unsigned volume of every trade from the anchoring trade through the
    /// terminating trade, including trades inside the spread.
    pub total_traded: u64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("episode window has zero traded volume")]
pub struct ZeroVolumeWindow;

impl ImbalanceEpisode {
    pub fn p0(&self) -> f64 {
        half_price_to_f64(self.start_mid_x2)
    }

    pub fn p_post(&self) -> f64 {
        half_price_to_f64(self.post_mid_x2)
    }

    pub fn duration_ns(&self) -> i64 {
        self.last_trade_ns - self.first_trade_ns
    }

    /// Relative excess of |V_I| over V_T.
    pub fn overshoot(&self) -> f64 {
        overshoot(self.imbalance, self.target)
    }

    pub fn participation(&self) -> Result<f64, ZeroVolumeWindow> {
        episode_participation(self)
    }
}

pub(crate) fn overshoot(imbalance: i64, target: u64) -> f64 {
    (imbalance.unsigned_abs() as f64 - target as f64) / target as f64
}

/// |V_I| over the total volume traded in the episode window, capped at 1.
pub fn episode_participation(e: &ImbalanceEpisode) -> Result<f64, ZeroVolumeWindow> {
    participation_ratio(e.imbalance, e.total_traded)
}

pub(crate) fn participation_ratio(imbalance: i64, total: u64) -> Result<f64, ZeroVolumeWindow> {
    if total == 0 {
        return Err(ZeroVolumeWindow);
    }
    Ok((imbalance.unsigned_abs() as f64 / total as f64).min(1.0))
}

/// Flat per-episode row of the episode dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub v: f64,
    #[serde(rename = "V_T")]
    pub target: u64,
    pub direction: Direction,
    #[serde(rename = "V_I")]
    pub imbalance: i64,
    pub impact_ticks: f64,
    pub duration_ns: i64,
    pub total_traded: u64,
    pub participation: f64,
    pub accepted: bool,
}

impl EpisodeRecord {
    pub fn from_episode(v: f64, e: &ImbalanceEpisode) -> Self {
        EpisodeRecord {
            v,
            target: e.target,
            direction: e.direction,
            imbalance: e.imbalance,
            impact_ticks: e.impact_ticks,
            duration_ns: e.duration_ns(),
            total_traded: e.total_traded,
            // terminated episodes always contain their terminating trade
            participation: e.participation().unwrap_or(0.0),
            accepted: e.accepted,
        }
    }
}

pub fn write_episode_dump<W: io::Write>(out: W, records: &[EpisodeRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "v",
            "V_T",
            "direction",
            "V_I",
            "impact_ticks",
            "duration_ns",
            "total_traded",
            "participation",
            "accepted",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_episode_dump<R: io::Read>(input: R) -> csv::Result<Vec<EpisodeRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
