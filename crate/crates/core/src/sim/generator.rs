//! Event-driven market simulator.
//!
//! The book has infinite depth: every level behind the touch holds a fresh
//! `touch_size` (optionally jittered). Noise traders on both sides send
//! market orders at equal Poisson rates with geometric sizes. A market order
//! that exhausts the touch moves it one tick away, widening the spread. The
//! market maker reacts after `replenish_delay_ms`: it tops partially consumed
//! touches back up and closes a wide spread one tick at a time, improving the
//! bid or the ask with equal probability. The mid is therefore a martingale
//! under the market maker's moves and each fully consumed level shifts it by
//! half a tick.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::{Deserialize, Serialize};

use super::config::{InformedConfig, InformedStyle, SimConfig, SimError};
use super::truth::{GroundTruth, TruthRecord};
use crate::market_data::{Level, Level1Event, SessionDescriptor, TickWriter, Timestamp};
use crate::price::Price;

const NS_PER_SEC: f64 = 1e9;

/// Counters kept by the generator while it runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimStats {
    pub events: u64,
    pub trades: u64,
    pub quotes: u64,
    pub executed_volume: u64,
    pub noise_orders: u64,
    pub noise_buy_volume: u64,
    pub noise_sell_volume: u64,
    pub informed_volume: u64,
    pub levels_consumed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub descriptor: SessionDescriptor,
    pub truth: GroundTruth,
    pub stats: SimStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Buy,
    Sell,
}

#[derive(Debug, Clone)]
enum Informed {
    Waiting {
        start: Timestamp,
    },
    Working {
        side: Side,
        start: Timestamp,
        executed: u64,
        noise_volume: u64,
        last_trade: Timestamp,
    },
}

struct Simulator<'a, F: FnMut(&Level1Event)> {
    cfg: &'a SimConfig,
    rng: ChaCha8Rng,
    tick: Price,
    sink: F,
    bid_px: i64,
    ask_px: i64,
    bid_sz: u64,
    ask_sz: u64,
    next_noise: Timestamp,
    noise_gap: Exp<f64>,
    noise_size: Geometric,
    maintenance_at: Option<Timestamp>,
    delay_ns: i64,
    informed: Option<Informed>,
    truth: Vec<TruthRecord>,
    stats: SimStats,
}

impl<'a, F: FnMut(&Level1Event)> Simulator<'a, F> {
    fn new(cfg: &'a SimConfig, sink: F) -> Self {
        let tick = Price::from_f64(cfg.tick_size);
        let mid_ticks = cfg.initial_mid / cfg.tick_size;
        let bid_px = (mid_ticks - 0.5).round() as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let noise_gap = Exp::new(2.0 * cfg.noise_rate).expect("positive rate");
        let noise_size = Geometric::new(1.0 / cfg.noise_mean_size).expect("mean >= 1");
        let next_noise = (noise_gap.sample(&mut rng) * NS_PER_SEC) as i64;
        let informed = cfg.informed.as_ref().map(|inf| Informed::Waiting {
            start: (inf.spacing_seconds * NS_PER_SEC) as i64,
        });
        let mut sim = Simulator {
            cfg,
            rng,
            tick,
            sink,
            bid_px,
            ask_px: bid_px + 1,
            bid_sz: 0,
            ask_sz: 0,
            next_noise,
            noise_gap,
            noise_size,
            maintenance_at: None,
            delay_ns: (cfg.replenish_delay_ms * 1e6) as i64,
            informed,
            truth: Vec::new(),
            stats: SimStats::default(),
        };
        sim.bid_sz = sim.fresh_level();
        sim.ask_sz = sim.fresh_level();
        sim
    }

    fn fresh_level(&mut self) -> u64 {
        let target = self.cfg.touch_size;
        if self.cfg.touch_jitter == 0.0 {
            return target;
        }
        let j = self.cfg.touch_jitter;
        let lo = target as f64 * (1.0 - j);
        let hi = target as f64 * (1.0 + j);
        (self.rng.gen_range(lo..=hi).round() as u64).max(1)
    }

    fn emit(&mut self, event: Level1Event) {
        self.stats.events += 1;
        if event.is_trade() {
            self.stats.trades += 1;
        } else {
            self.stats.quotes += 1;
        }
        (self.sink)(&event);
    }

    fn emit_quote(&mut self, t: Timestamp) {
        let bid = Level::new(Price(self.bid_px * self.tick.units()), self.bid_sz);
        let ask = Level::new(Price(self.ask_px * self.tick.units()), self.ask_sz);
        self.emit(Level1Event::quote(t, bid, ask));
    }

    /// Executes a market order level by level, then reports the new touch.
    fn market_order(&mut self, t: Timestamp, side: Side, mut qty: u64) {
        while qty > 0 {
            let (px, sz) = match side {
                Side::Buy => (self.ask_px, self.ask_sz),
                Side::Sell => (self.bid_px, self.bid_sz),
            };
            let fill = qty.min(sz);
            self.emit(Level1Event::trade(t, Price(px * self.tick.units()), fill));
            self.stats.executed_volume += fill;
            qty -= fill;
            let left = sz - fill;
            let fresh = if left == 0 {
                Some(self.fresh_level())
            } else {
                None
            };
            match (side, fresh) {
                (Side::Buy, None) => self.ask_sz = left,
                (Side::Sell, None) => self.bid_sz = left,
                (Side::Buy, Some(f)) => {
                    self.ask_px += 1;
                    self.ask_sz = f;
                }
                (Side::Sell, Some(f)) => {
                    self.bid_px -= 1;
                    self.bid_sz = f;
                }
            }
            if left == 0 {
                self.stats.levels_consumed += 1;
            }
        }
        self.emit_quote(t);
        if self.maintenance_at.is_none() {
            self.maintenance_at = Some(t + self.delay_ns);
        }
    }

    fn maintain(&mut self, t: Timestamp) {
        if self.ask_px - self.bid_px > 1 {
            let fresh = self.fresh_level();
            if self.rng.gen_bool(0.5) {
                self.bid_px += 1;
                self.bid_sz = fresh;
            } else {
                self.ask_px -= 1;
                self.ask_sz = fresh;
            }
        }
        let target = self.cfg.touch_size;
        if self.bid_sz < target {
            self.bid_sz = self.fresh_level().max(self.bid_sz);
        }
        if self.ask_sz < target {
            self.ask_sz = self.fresh_level().max(self.ask_sz);
        }
        self.emit_quote(t);
        self.maintenance_at = if self.ask_px - self.bid_px > 1 {
            Some(t + self.delay_ns)
        } else {
            None
        };
    }

    fn noise_order(&mut self, t: Timestamp) {
        let side = if self.rng.gen_bool(0.5) {
            Side::Buy
        } else {
            Side::Sell
        };
        let size = 1 + self.noise_size.sample(&mut self.rng);
        self.next_noise = t + ((self.noise_gap.sample(&mut self.rng) * NS_PER_SEC) as i64).max(1);
        self.stats.noise_orders += 1;
        match side {
            Side::Buy => self.stats.noise_buy_volume += size,
            Side::Sell => self.stats.noise_sell_volume += size,
        }
        self.market_order(t, side, size);
        if let Some(Informed::Working { noise_volume, .. }) = &mut self.informed {
            *noise_volume += size;
            self.pov_top_up(t);
        }
    }

    fn informed_cfg(&self) -> &'a InformedConfig {
        self.cfg
            .informed
            .as_ref()
            .expect("informed trader configured")
    }

    fn start_informed(&mut self, t: Timestamp) {
        let inf = self.informed_cfg();
        let side = if self.rng.gen_bool(0.5) {
            Side::Buy
        } else {
            Side::Sell
        };
        self.informed = Some(Informed::Working {
            side,
            start: t,
            executed: 0,
            noise_volume: 0,
            last_trade: t,
        });
        if inf.style == InformedStyle::Aggressive || inf.pov_rate >= 1.0 {
            self.informed_trade(t, inf.volume);
        }
    }

    /// Brings the informed share of window volume back up to the PoV rate.
    fn pov_top_up(&mut self, t: Timestamp) {
        let inf = self.informed_cfg();
        let Some(Informed::Working {
            executed,
            noise_volume,
            ..
        }) = self.informed
        else {
            return;
        };
        let p = inf.pov_rate;
        let wanted = if p >= 1.0 {
            inf.volume
        } else {
            ((p / (1.0 - p) * noise_volume as f64 - 1e-9).ceil() as u64).min(inf.volume)
        };
        if wanted > executed {
            self.informed_trade(t, wanted - executed);
        }
    }

    fn informed_trade(&mut self, t: Timestamp, qty: u64) {
        let Some(Informed::Working { side, .. }) = self.informed else {
            return;
        };
        self.stats.informed_volume += qty;
        self.market_order(t, side, qty);
        let inf = self.informed_cfg();
        let Some(Informed::Working {
            start,
            executed,
            noise_volume,
            last_trade,
            ..
        }) = &mut self.informed
        else {
            return;
        };
        *executed += qty;
        *last_trade = t;
        if *executed >= inf.volume {
            self.truth.push(TruthRecord {
                episode_id: self.truth.len() as u64,
                t_start_ns: *start,
                t_end_ns: *last_trade,
                volume: inf.volume,
                style: inf.style,
                true_participation: *executed as f64 / (*executed + *noise_volume) as f64,
            });
            self.informed = Some(Informed::Waiting {
                start: t + (inf.spacing_seconds * NS_PER_SEC) as i64,
            });
        }
    }

    fn run(mut self, end: Timestamp) -> (GroundTruth, SimStats) {
        self.emit_quote(0);
        let cap = self.cfg.max_events;
        loop {
            if cap > 0 && self.stats.events >= cap {
                break;
            }
            let informed_at = match self.informed {
                Some(Informed::Waiting { start }) => start,
                _ => Timestamp::MAX,
            };
            let maint_at = self.maintenance_at.unwrap_or(Timestamp::MAX);
            let t = maint_at.min(informed_at).min(self.next_noise);
            if t > end {
                break;
            }
            if t == maint_at {
                self.maintain(t);
            } else if t == informed_at {
                self.start_informed(t);
            } else {
                self.noise_order(t);
            }
        }
        (
            GroundTruth {
                records: self.truth,
            },
            self.stats,
        )
    }
}

fn descriptor(cfg: &SimConfig) -> Result<SessionDescriptor, SimError> {
    SessionDescriptor::new(
        cfg.instrument.clone(),
        Price::from_f64(cfg.tick_size),
        0,
        (cfg.session_seconds * NS_PER_SEC) as i64,
    )
    .map_err(|e| SimError::ConfigInvalid(e.to_string()))
}

/// Runs a session, handing each event to `sink` in stream order.
pub fn generate_session_with<F: FnMut(&Level1Event)>(
    cfg: &SimConfig,
    sink: F,
) -> Result<SimOutput, SimError> {
    cfg.validate()?;
    let descriptor = descriptor(cfg)?;
    let (truth, stats) = Simulator::new(cfg, sink).run(descriptor.session_end_ns);
    Ok(SimOutput {
        descriptor,
        truth,
        stats,
    })
}

/// Runs a session and collects its events.
pub fn generate_session(cfg: &SimConfig) -> Result<(Vec<Level1Event>, SimOutput), SimError> {
    let mut events = Vec::new();
    let out = generate_session_with(cfg, |e| events.push(*e))?;
    Ok((events, out))
}

/// Runs a session straight into a canonical tick file.
pub fn write_session<W: Write>(cfg: &SimConfig, out: W) -> Result<SimOutput, SimError> {
    let tick = Price::from_f64(cfg.tick_size);
    let mut writer = TickWriter::new(out, tick);
    writer.write_header()?;
    let mut result = Ok(());
    let out = generate_session_with(cfg, |e| {
        if result.is_ok() {
            result = writer.write_event(e);
        }
    })?;
    result?;
    writer.flush()?;
    Ok(out)
}
