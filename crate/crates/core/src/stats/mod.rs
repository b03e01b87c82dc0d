//! Per-volume impact statistics, the linear impact fit and participation.

mod bins;
mod participation;
pub mod quantile;
mod regression;

pub use bins::{aggregate_bins, read_bins_csv, write_bins_csv, VolumeBinStats, DEFAULT_MIN_COUNT};
pub use participation::{participation_curve, ParticipationCurve};
pub use regression::{
    estimate_impact, estimate_impact_price, fit_linear, fit_linear_with, lambda_error, FitError,
    FitPoint, RegressionResult, Weighting, ESTIMATED_SLOPE,
};
