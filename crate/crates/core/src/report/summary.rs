use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::analysis::Analysis;
use crate::stats::{lambda_error, Weighting, ESTIMATED_SLOPE};

/// Intercepts above this many ticks mark an instrument as concave at small
/// volumes. Reporting heuristic only.
pub const CONCAVE_INTERCEPT: f64 = 0.25;

#[derive(Debug, Error)]
#[error("invalid regression summary: {0}")]
pub struct SummaryError(#[from] toml::de::Error);

/// Key = value summary of one analysis, written as `regression.txt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub instrument: String,
    pub tick_size: f64,
    pub touch_volume: f64,
    pub v_step: f64,
    pub v_max: f64,
    pub overshoot_tol: f64,
    pub min_count: usize,
    pub weighting: Weighting,
    pub events: u64,
    pub trades: u64,
    pub episodes: u64,
    pub accepted_episodes: u64,
    pub dropped_no_post_quote: u64,
    pub bins: u64,
    pub fitted_bins: u64,
    /// `ok` or the reason no line was fitted.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_std_error: Option<f64>,
    pub lambda_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_err_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participation_asymptote: Option<f64>,
}

impl RegressionSummary {
    pub fn from_analysis(a: &Analysis) -> Self {
        let fit = a.fit.as_ref();
        RegressionSummary {
            instrument: a.descriptor.instrument.clone(),
            tick_size: a.descriptor.tick_size,
            touch_volume: a.touch_volume,
            v_step: a.options.v_step,
            v_max: a.options.v_max,
            overshoot_tol: a.options.overshoot_tol,
            min_count: a.options.min_count,
            weighting: a.options.weighting,
            events: a.counters.events,
            trades: a.counters.trades,
            episodes: a.records.len() as u64,
            accepted_episodes: a.accepted_episodes() as u64,
            dropped_no_post_quote: a.dropped_no_post_quote,
            bins: a.bins.len() as u64,
            fitted_bins: fit.map_or(0, |f| f.points as u64),
            status: match &a.fit_failure {
                None => "ok".to_string(),
                Some(reason) => reason.clone(),
            },
            mu: fit.map(|f| f.intercept),
            lambda: fit.map(|f| f.slope),
            r2: fit.map(|f| f.r_squared),
            p_value: fit.map(|f| f.p_value),
            slope_std_error: fit.map(|f| f.slope_std_error),
            lambda_estimate: ESTIMATED_SLOPE,
            lambda_err_pct: fit.map(|f| lambda_error(f.slope)),
            participation_asymptote: a.participation.as_ref().map(|p| p.asymptote),
        }
    }

    pub fn is_concave(&self) -> bool {
        self.mu.is_some_and(|mu| mu > CONCAVE_INTERCEPT)
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("summary serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, SummaryError> {
        Ok(toml::from_str(text)?)
    }
}
