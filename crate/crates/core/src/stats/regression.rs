//! Linear impact model `I = μ + λ·v` fitted by ordinary least squares on
//! per-bin mean impacts, and the half-tick estimator it is compared to.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use super::bins::VolumeBinStats;

/// Slope of the half-tick estimator, in ticks per unit of normalised volume.
pub const ESTIMATED_SLOPE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 3 points to fit, got {0}")]
    TooFewPoints(usize),
    #[error("all points share the same volume")]
    DegenerateDesign,
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub v: f64,
    pub mean_impact: f64,
    pub n: usize,
}

impl From<&VolumeBinStats> for FitPoint {
    fn from(b: &VolumeBinStats) -> Self {
        FitPoint {
            v: b.v,
            mean_impact: b.mean_impact,
            n: b.n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Every bin counts once.
    #[default]
    Unweighted,
    /// Bins weighted by their episode count.
    ByCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    /// Intercept μ_I in ticks.
    pub intercept: f64,
    /// Slope λ_I in ticks per unit v.
    pub slope: f64,
    pub r_squared: f64,
    /// Two-sided p-value of the t-test for a zero slope.
    pub p_value: f64,
    pub slope_std_error: f64,
    pub t_statistic: f64,
    pub points: usize,
    pub weighting: Weighting,
}

impl RegressionResult {
    pub fn lambda_estimate(&self) -> f64 {
        ESTIMATED_SLOPE
    }

    pub fn lambda_error_pct(&self) -> f64 {
        lambda_error(self.slope)
    }

    pub fn predict(&self, v: f64) -> f64 {
        self.intercept + self.slope * v
    }
}

/// Unweighted OLS of mean impact against v.
pub fn fit_linear(points: &[FitPoint]) -> Result<RegressionResult, FitError> {
    fit_linear_with(points, Weighting::Unweighted)
}

pub fn fit_linear_with(
    points: &[FitPoint],
    weighting: Weighting,
) -> Result<RegressionResult, FitError> {
    let n = points.len();
    if n < 3 {
        return Err(FitError::TooFewPoints(n));
    }
    if points
        .iter()
        .any(|p| !p.v.is_finite() || !p.mean_impact.is_finite())
    {
        return Err(FitError::NonFinite);
    }
    let weight = |p: &FitPoint| match weighting {
        Weighting::Unweighted => 1.0,
        Weighting::ByCount => p.n as f64,
    };
    let w_sum: f64 = points.iter().map(weight).sum();
    if w_sum.is_nan() || w_sum <= 0.0 {
        return Err(FitError::DegenerateDesign);
    }
    let x_bar = points.iter().map(|p| weight(p) * p.v).sum::<f64>() / w_sum;
    let y_bar = points
        .iter()
        .map(|p| weight(p) * p.mean_impact)
        .sum::<f64>()
        / w_sum;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let w = weight(p);
        let dx = p.v - x_bar;
        let dy = p.mean_impact - y_bar;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    if sxx <= 0.0 || points.iter().all(|p| p.v == points[0].v) {
        return Err(FitError::DegenerateDesign);
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let sse: f64 = points
        .iter()
        .map(|p| weight(p) * (p.mean_impact - intercept - slope * p.v).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let df = (n - 2) as f64;
    let slope_std_error = (sse / df / sxx).sqrt();
    let (t_statistic, p_value) = slope_test(slope, slope_std_error, df);
    Ok(RegressionResult {
        intercept,
        slope,
        r_squared,
        p_value,
        slope_std_error,
        t_statistic,
        points: n,
        weighting,
    })
}

fn slope_test(slope: f64, se: f64, df: f64) -> (f64, f64) {
    if se == 0.0 {
        return if slope == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(slope), 0.0)
        };
    }
    let t = slope / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    let p = (2.0 * dist.cdf(-t.abs())).clamp(0.0, 1.0);
    (t, p)
}

/// Half-tick estimate of the impact of normalised volume `v`, in ticks.
pub fn estimate_impact(v: f64) -> f64 {
    ESTIMATED_SLOPE * v
}

/// The same estimate in currency: (δ/2)·v.
pub fn estimate_impact_price(v: f64, tick_size: f64) -> f64 {
    tick_size / 2.0 * v
}

/// Percentage difference between a fitted slope and the half-tick estimate.
pub fn lambda_error(slope: f64) -> f64 {
    (slope - ESTIMATED_SLOPE).abs() / ESTIMATED_SLOPE * 100.0
}
