use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("write error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformedStyle {
    /// One market order of the full episode volume.
    Aggressive,
    /// Tracks a fixed share of market volume, crossing the spread whenever
    /// it falls behind.
    Pov,
}

impl InformedStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            InformedStyle::Aggressive => "aggressive",
            InformedStyle::Pov => "pov",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformedConfig {
    /// Net volume V_T executed per episode, in contracts.
    pub volume: u64,
    pub style: InformedStyle,
    /// Target share of volume for `pov` episodes.
    #[serde(default = "default_pov_rate")]
    pub pov_rate: f64,
    /// Idle time between the end of one episode and the start of the next.
    pub spacing_seconds: f64,
}

fn default_pov_rate() -> f64 {
    1.0
}

/// Parameters of a synthetic session.
///
/// ```toml
/// seed = 7
/// session_seconds = 3600.0
/// tick_size = 0.01
/// initial_mid = 100.005
/// touch_size = 14
/// noise_rate = 0.5
/// noise_mean_size = 3.0
///
/// [informed]
/// volume = 28
/// style = "pov"
/// pov_rate = 0.21
/// spacing_seconds = 5.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    #[serde(default = "default_instrument")]
    pub instrument: String,
    pub session_seconds: f64,
    pub tick_size: f64,
    #[serde(default = "default_initial_mid")]
    pub initial_mid: f64,
    /// Size of every freshly exposed book level, per side.
    pub touch_size: u64,
    /// Fresh levels are drawn uniformly from touch_size·(1 ± jitter).
    #[serde(default)]
    pub touch_jitter: f64,
    /// Noise market orders per second on each side.
    pub noise_rate: f64,
    /// Mean of the geometric noise order size (≥ 1).
    pub noise_mean_size: f64,
    /// Market maker reaction time after the touch is hit.
    #[serde(default = "default_replenish_delay_ms")]
    pub replenish_delay_ms: f64,
    /// Stop after this many events (0 = run to the session end).
    #[serde(default)]
    pub max_events: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub informed: Option<InformedConfig>,
}

fn default_instrument() -> String {
    "SIM".to_string()
}

fn default_initial_mid() -> f64 {
    100.005
}

fn default_replenish_delay_ms() -> f64 {
    50.0
}

impl SimConfig {
    /// A balanced market without informed flow.
    pub fn baseline(seed: u64) -> Self {
        SimConfig {
            seed,
            instrument: default_instrument(),
            session_seconds: 3600.0,
            tick_size: 0.01,
            initial_mid: default_initial_mid(),
            touch_size: 14,
            touch_jitter: 0.0,
            noise_rate: 0.5,
            noise_mean_size: 3.0,
            replenish_delay_ms: default_replenish_delay_ms(),
            max_events: 0,
            informed: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let cfg: SimConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::ConfigInvalid(msg));
        if self.seed > i64::MAX as u64 {
            return bad(format!("seed must be at most {}", i64::MAX));
        }
        if !(self.session_seconds > 0.0 && self.session_seconds.is_finite()) {
            return bad(format!(
                "session_seconds must be positive, got {}",
                self.session_seconds
            ));
        }
        if !(self.tick_size > 0.0 && self.tick_size.is_finite()) {
            return bad(format!(
                "tick_size must be positive, got {}",
                self.tick_size
            ));
        }
        if !self.initial_mid.is_finite() {
            return bad("initial_mid must be finite".into());
        }
        if self.touch_size == 0 {
            return bad("touch_size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.touch_jitter) {
            return bad(format!(
                "touch_jitter must be in [0, 1), got {}",
                self.touch_jitter
            ));
        }
        if !(self.noise_rate > 0.0 && self.noise_rate.is_finite()) {
            return bad(format!(
                "noise_rate must be positive, got {}",
                self.noise_rate
            ));
        }
        if !(self.noise_mean_size >= 1.0 && self.noise_mean_size.is_finite()) {
            return bad(format!(
                "noise_mean_size must be at least 1, got {}",
                self.noise_mean_size
            ));
        }
        if !(self.replenish_delay_ms >= 0.0 && self.replenish_delay_ms.is_finite()) {
            return bad(format!(
                "replenish_delay_ms must be non-negative, got {}",
                self.replenish_delay_ms
            ));
        }
        if let Some(inf) = &self.informed {
            if inf.volume == 0 {
                return bad("informed.volume must be at least 1".into());
            }
            if !(inf.pov_rate > 0.0 && inf.pov_rate <= 1.0) {
                return bad(format!(
                    "informed.pov_rate must be in (0, 1], got {}",
                    inf.pov_rate
                ));
            }
            if !(inf.spacing_seconds >= 0.0 && inf.spacing_seconds.is_finite()) {
                return bad(format!(
                    "informed.spacing_seconds must be non-negative, got {}",
                    inf.spacing_seconds
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut cfg = SimConfig::baseline(3);
        cfg.informed = Some(InformedConfig {
            volume: 28,
            style: InformedStyle::Pov,
            pov_rate: 0.21,
            spacing_seconds: 5.0,
        });
        assert_eq!(SimConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn missing_seed_is_named() {
        let text = "session_seconds = 10.0\ntick_size = 0.01\ntouch_size = 5\nnoise_rate = 1.0\nnoise_mean_size = 2.0\n";
        let err = SimConfig::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("seed"), "{err}");
    }

    #[test]
    fn rejects_invalid_values() {
        let mut cfg = SimConfig::baseline(1);
        cfg.noise_rate = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::baseline(1);
        cfg.informed = Some(InformedConfig {
            volume: 5,
            style: InformedStyle::Pov,
            pov_rate: 1.5,
            spacing_seconds: 1.0,
        });
        assert!(cfg.validate().is_err());
    }
}
