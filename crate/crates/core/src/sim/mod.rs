//! Deterministic synthetic Level-1 market with an optional informed trader.

mod config;
mod generator;
mod replay;
mod truth;

pub use config::{InformedConfig, InformedStyle, SimConfig, SimError};
pub use generator::{generate_session, generate_session_with, write_session, SimOutput, SimStats};
pub use replay::{replay_check, replay_check_events, Diagnostics, Violation, ViolationKind};
pub use truth::{GroundTruth, TruthRecord};
