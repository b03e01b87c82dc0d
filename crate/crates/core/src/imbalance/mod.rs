//! Trade-imbalance episode extraction.
//!
//! Signed trade volumes are summed from an equilibrium state until the
//! imbalance reaches a target volume V_T. The mid-price move from the episode
//! anchor to the first quote after the terminating trade is the impact of an
//! order of size V_T; the episode window also yields an execution time and a
//! participation rate.

mod episode;
mod machine;
mod scan;
mod sign;

pub use episode::{
    episode_participation, read_episode_dump, write_episode_dump, Direction, EpisodeRecord,
    ImbalanceEpisode, ZeroVolumeWindow,
};
pub use scan::{
    default_grid, extract_episodes, fused_multi_target_scan, target_volume, volume_grid,
    ConfigError, Extraction, ExtractionConfig, FusedScanner, GridEpisodes, ScanCounters,
    ScanOutput,
};
pub use sign::{classify_trade, NoQuoteYet, TradeSign};
