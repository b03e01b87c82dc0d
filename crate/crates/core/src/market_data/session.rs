use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::event::Timestamp;
use crate::price::Price;

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("cannot read descriptor {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid descriptor: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid descriptor: {0}")]
    Invalid(String),
}

/// Instrument and session bounds for one tick file.
///
/// Stored next to the tick file as a small TOML document:
///
/// ```text
/// instrument = "CLc1"
/// tick_size = 0.01
/// session_start_ns = 0
/// session_end_ns = 28800000000000
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionDescriptor {
    pub instrument: String,
    pub tick_size: f64,
    pub session_start_ns: Timestamp,
    pub session_end_ns: Timestamp,
}

impl SessionDescriptor {
    pub fn new(
        instrument: impl Into<String>,
        tick_size: Price,
        session_start_ns: Timestamp,
        session_end_ns: Timestamp,
    ) -> Result<Self, DescriptorError> {
        let desc = SessionDescriptor {
            instrument: instrument.into(),
            tick_size: tick_size.to_f64(),
            session_start_ns,
            session_end_ns,
        };
        desc.validate()?;
        Ok(desc)
    }

    /// Tick size δ as a fixed-point price.
    pub fn tick(&self) -> Price {
        Price::from_f64(self.tick_size)
    }

    pub fn validate(&self) -> Result<(), DescriptorError> {
        if !(self.tick_size.is_finite() && self.tick() > Price::ZERO) {
            return Err(DescriptorError::Invalid(format!(
                "tick_size must be positive, got {}",
                self.tick_size
            )));
        }
        if self.session_start_ns >= self.session_end_ns {
            return Err(DescriptorError::Invalid(format!(
                "session_start_ns ({}) must be before session_end_ns ({})",
                self.session_start_ns, self.session_end_ns
            )));
        }
        Ok(())
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        t >= self.session_start_ns && t <= self.session_end_ns
    }

    pub fn from_toml(text: &str) -> Result<Self, DescriptorError> {
        let desc: SessionDescriptor = toml::from_str(text)?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serializes")
    }

    pub fn load(path: &Path) -> Result<Self, DescriptorError> {
        let text = std::fs::read_to_string(path).map_err(|source| DescriptorError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }
}
