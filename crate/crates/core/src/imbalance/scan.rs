use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::episode::ImbalanceEpisode;
use super::machine::EpisodeMachine;
use super::sign::TradeSign;
use crate::market_data::{BookState, EventKind, Level1Event, SessionDescriptor, Timestamp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("overshoot tolerance must be positive, got {0}")]
    Overshoot(f64),
    #[error("volume grid must be non-empty, positive and strictly increasing")]
    Grid,
    #[error("touch volume must be positive and finite, got {0}")]
    Touch(f64),
}

/// Default normalised volume grid: 0.25, 0.5, …, 5.0.
pub fn default_grid() -> Vec<f64> {
    volume_grid(0.25, 5.0)
}

/// `step, 2·step, …` up to and including `max` (with a small tolerance).
pub fn volume_grid(step: f64, max: f64) -> Vec<f64> {
    if !(step > 0.0 && max >= step) {
        return Vec::new();
    }
    let n = (max / step + 1e-9).floor() as usize;
    (1..=n).map(|k| k as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    /// Largest accepted (|V_I| - V_T) / V_T.
    pub overshoot_tol: f64,
    /// Normalised volumes v = V_T / ⟨V_Touch⟩.
    pub v_grid: Vec<f64>,
    /// ⟨V_Touch⟩ in contracts.
    pub touch_volume: f64,
    /// Drop episodes with no quote after the terminating trade; otherwise
    /// close them at the mid of the terminating trade.
    pub require_post_quote: bool,
}

impl ExtractionConfig {
    pub fn new(touch_volume: f64) -> Self {
        ExtractionConfig {
            overshoot_tol: 0.1,
            v_grid: default_grid(),
            touch_volume,
            require_post_quote: true,
        }
    }

    // negated comparisons so that NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.overshoot_tol > 0.0) {
            return Err(ConfigError::Overshoot(self.overshoot_tol));
        }
        if !(self.touch_volume.is_finite() && self.touch_volume > 0.0) {
            return Err(ConfigError::Touch(self.touch_volume));
        }
        let increasing = self.v_grid.windows(2).all(|w| w[0] < w[1]);
        if self.v_grid.is_empty() || !increasing || !(self.v_grid[0] > 0.0) {
            return Err(ConfigError::Grid);
        }
        Ok(())
    }

    /// V_T for a normalised volume: round(v·touch), at least one contract.
    pub fn target_for(&self, v: f64) -> u64 {
        target_volume(v, self.touch_volume)
    }

    pub fn targets(&self) -> Vec<u64> {
        self.v_grid.iter().map(|&v| self.target_for(v)).collect()
    }
}

pub fn target_volume(v: f64, touch_volume: f64) -> u64 {
    ((v * touch_volume).round() as u64).max(1)
}

/// Events the scanner could not use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCounters {
    pub events: u64,
    pub trades: u64,
    pub quotes: u64,
    pub out_of_session: u64,
    pub before_first_quote: u64,
    pub invalid_quotes: u64,
    pub trades_on_invalid_book: u64,
    pub inside_trades: u64,
}

/// Episodes for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEpisodes {
    pub v: f64,
    pub target: u64,
    pub episodes: Vec<ImbalanceEpisode>,
    /// Terminated episodes that never saw a post-trade quote.
    pub dropped_no_post_quote: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub grid: Vec<GridEpisodes>,
    pub counters: ScanCounters,
}

/// Single pass over a session driving one state machine per target volume.
pub struct FusedScanner {
    book: BookState,
    tick_units: i64,
    session_start: Timestamp,
    session_end: Timestamp,
    overshoot_tol: f64,
    require_post_quote: bool,
    started: bool,
    machines: Vec<EpisodeMachine>,
    waiting: usize,
    grid: Vec<GridEpisodes>,
    counters: ScanCounters,
}

impl FusedScanner {
    pub fn new(desc: &SessionDescriptor, cfg: &ExtractionConfig) -> Self {
        Self::with_targets(
            desc,
            cfg.v_grid.iter().map(|&v| (v, cfg.target_for(v))),
            cfg.overshoot_tol,
            cfg.require_post_quote,
        )
    }

    /// Scanner over explicit `(v, V_T)` pairs.
    pub fn with_targets(
        desc: &SessionDescriptor,
        targets: impl IntoIterator<Item = (f64, u64)>,
        overshoot_tol: f64,
        require_post_quote: bool,
    ) -> Self {
        let mut machines = Vec::new();
        let mut grid = Vec::new();
        for (v, target) in targets {
            let target = target.max(1);
            machines.push(EpisodeMachine::new(target));
            grid.push(GridEpisodes {
                v,
                target,
                episodes: Vec::new(),
                dropped_no_post_quote: 0,
            });
        }
        FusedScanner {
            book: BookState::new(desc.tick()),
            tick_units: desc.tick().units(),
            session_start: desc.session_start_ns,
            session_end: desc.session_end_ns,
            overshoot_tol,
            require_post_quote,
            started: false,
            machines,
            waiting: 0,
            grid,
            counters: ScanCounters::default(),
        }
    }

    pub fn push(&mut self, event: &Level1Event) {
        self.counters.events += 1;
        if event.timestamp < self.session_start || event.timestamp > self.session_end {
            self.counters.out_of_session += 1;
            return;
        }
        match event.kind {
            EventKind::Quote(_) => {
                self.counters.quotes += 1;
                self.book.apply(event);
                let Some(mid_x2) = self.book.mid_x2() else {
                    if self.started {
                        self.counters.invalid_quotes += 1;
                    } else {
                        self.counters.before_first_quote += 1;
                    }
                    return;
                };
                self.started = true;
                if self.waiting > 0 {
                    for (m, out) in self.machines.iter_mut().zip(self.grid.iter_mut()) {
                        if let Some(e) = m.on_quote(mid_x2, self.tick_units, self.overshoot_tol) {
                            out.episodes.push(e);
                        }
                    }
                    self.waiting = 0;
                }
            }
            EventKind::Trade { price, size } => {
                self.counters.trades += 1;
                if !self.started {
                    self.counters.before_first_quote += 1;
                    return;
                }
                let (Some(mid_x2), Some(bid), Some(ask)) =
                    (self.book.mid_x2(), self.book.bid(), self.book.ask())
                else {
                    self.counters.trades_on_invalid_book += 1;
                    return;
                };
                let sign = TradeSign::from_prices(price, bid.price, ask.price).value();
                if sign == 0 {
                    self.counters.inside_trades += 1;
                }
                let mut waiting = 0;
                for m in self.machines.iter_mut() {
                    m.on_trade(sign, size, mid_x2, event.timestamp);
                    waiting += m.is_waiting() as usize;
                }
                self.waiting = waiting;
            }
        }
    }

    pub fn counters(&self) -> &ScanCounters {
        &self.counters
    }

    /// Hands every episode completed so far to `f` as `(grid index, episode)`
    /// and forgets it, so long sessions need not hold them all twice.
    pub fn drain_episodes(&mut self, mut f: impl FnMut(usize, ImbalanceEpisode)) {
        for (i, g) in self.grid.iter_mut().enumerate() {
            for e in g.episodes.drain(..) {
                f(i, e);
            }
        }
    }

    pub fn finish(mut self) -> ScanOutput {
        for (m, out) in self.machines.iter_mut().zip(self.grid.iter_mut()) {
            if !m.is_waiting() {
                continue;
            }
            if self.require_post_quote {
                out.dropped_no_post_quote += 1;
            } else if let Some(e) = m.complete_without_quote(self.tick_units, self.overshoot_tol) {
                out.episodes.push(e);
            }
        }
        debug_assert!(self
            .machines
            .iter()
            .zip(&self.grid)
            .all(|(m, g)| m.target() == g.target));
        ScanOutput {
            grid: self.grid,
            counters: self.counters,
        }
    }
}

/// Runs every grid point of `cfg` over the session in a single pass.
pub fn fused_multi_target_scan<'a, I>(
    events: I,
    desc: &SessionDescriptor,
    cfg: &ExtractionConfig,
) -> ScanOutput
where
    I: IntoIterator<Item = &'a Level1Event>,
{
    let mut scanner = FusedScanner::new(desc, cfg);
    for e in events {
        scanner.push(e);
    }
    scanner.finish()
}

/// Extraction result for a single target volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub episodes: Vec<ImbalanceEpisode>,
    pub dropped_no_post_quote: u64,
    pub counters: ScanCounters,
}

/// Extracts the imbalance episodes of one session at target volume `target`.
pub fn extract_episodes<'a, I>(
    events: I,
    desc: &SessionDescriptor,
    target: u64,
    cfg: &ExtractionConfig,
) -> Extraction
where
    I: IntoIterator<Item = &'a Level1Event>,
{
    let mut scanner = FusedScanner::with_targets(
        desc,
        [(target as f64 / cfg.touch_volume, target)],
        cfg.overshoot_tol,
        cfg.require_post_quote,
    );
    for e in events {
        scanner.push(e);
    }
    let mut out = scanner.finish();
    let grid = out.grid.pop().expect("one target");
    Extraction {
        episodes: grid.episodes,
        dropped_no_post_quote: grid.dropped_no_post_quote,
        counters: out.counters,
    }
}
