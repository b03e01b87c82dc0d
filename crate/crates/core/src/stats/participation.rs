use serde::{Deserialize, Serialize};

use super::bins::VolumeBinStats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipationCurve {
    /// (v, median participation) in increasing v.
    pub points: Vec<(f64, f64)>,
    /// Median participation at the largest volume.
    pub asymptote: f64,
}

/// Median participation rate as a function of normalised volume.
///
/// Returns `None` when there are no bins.
pub fn participation_curve(bins: &[VolumeBinStats]) -> Option<ParticipationCurve> {
    let mut points: Vec<(f64, f64)> = bins.iter().map(|b| (b.v, b.median_participation)).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let asymptote = points.last()?.1;
    Some(ParticipationCurve { points, asymptote })
}
