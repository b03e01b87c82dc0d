//! Trade-imbalance market impact analytics for Level-1 tick data.
//!
//! The pipeline reads a time-ordered stream of trades and quotes, computes the
//! time-weighted touch volume, extracts trade-imbalance episodes for a grid of
//! normalized volumes in a single pass, aggregates per-volume statistics and
//! fits the linear impact model `I = mu + lambda * v`. Impacts are measured in
//! ticks; the reference estimator is half a tick per unit of touch volume.
//!
//! A deterministic simulator produces synthetic sessions with a known informed
//! trader for testing and calibration.

pub mod imbalance;
pub mod market_data;
pub mod price;
pub mod report;
pub mod sim;
pub mod stats;

pub use price::Price;
