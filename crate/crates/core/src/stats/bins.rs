use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use super::quantile::{median, quartiles_sorted, sorted};
use crate::imbalance::EpisodeRecord;

pub const DEFAULT_MIN_COUNT: usize = 30;

/// Statistics of the accepted episodes at one normalised volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeBinStats {
    pub v: f64,
    #[serde(rename = "V_T")]
    pub target: u64,
    pub n: usize,
    /// Fewer episodes than the configured minimum; kept but not fitted.
    pub low_count: bool,
    pub mean_impact: f64,
    pub sd_impact: f64,
    pub min_impact: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max_impact: f64,
    /// Impacts outside [q1 - 1.5·IQR, q3 + 1.5·IQR].
    #[serde(with = "list")]
    pub outliers: Vec<f64>,
    /// Episode count per impact value, keyed in half ticks.
    #[serde(with = "histogram")]
    pub histogram: BTreeMap<i64, u64>,
    pub median_participation: f64,
    pub mean_duration_s: f64,
    /// Mean duration after dropping durations above q3 + 1.5·IQR.
    pub mean_duration_trimmed_s: f64,
    pub median_duration_s: f64,
    pub zero_time_fraction: f64,
}

/// Groups accepted episodes by `v` and summarises each group.
///
/// Bins are returned in increasing `v`; volumes with no accepted episode are
/// omitted and bins below `min_count` are flagged with `low_count`.
pub fn aggregate_bins(records: &[EpisodeRecord], min_count: usize) -> Vec<VolumeBinStats> {
    let mut groups: Vec<(f64, u64, Vec<&EpisodeRecord>)> = Vec::new();
    for r in records.iter().filter(|r| r.accepted) {
        match groups
            .iter_mut()
            .find(|(v, t, _)| *v == r.v && *t == r.target)
        {
            Some((_, _, g)) => g.push(r),
            None => groups.push((r.v, r.target, vec![r])),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    groups
        .into_iter()
        .map(|(v, target, g)| summarize(v, target, &g, min_count))
        .collect()
}

fn summarize(v: f64, target: u64, episodes: &[&EpisodeRecord], min_count: usize) -> VolumeBinStats {
    let n = episodes.len();
    let impacts = sorted(episodes.iter().map(|e| e.impact_ticks));
    let q = quartiles_sorted(&impacts).expect("non-empty bin");
    let mean = impacts.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (impacts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let outliers = impacts
        .iter()
        .copied()
        .filter(|&x| x < q.lower_fence() || x > q.upper_fence())
        .collect();
    let mut histogram = BTreeMap::new();
    for &x in &impacts {
        *histogram.entry((x * 2.0).round() as i64).or_insert(0) += 1;
    }

    let durations = sorted(episodes.iter().map(|e| e.duration_ns as f64 / 1e9));
    let dq = quartiles_sorted(&durations).expect("non-empty bin");
    let fence = dq.upper_fence();
    let kept: Vec<f64> = durations.iter().copied().filter(|&d| d <= fence).collect();
    let zero = episodes.iter().filter(|e| e.duration_ns == 0).count();

    VolumeBinStats {
        v,
        target,
        n,
        low_count: n < min_count,
        mean_impact: mean,
        sd_impact: sd,
        min_impact: impacts[0],
        q1: q.q1,
        median: q.median,
        q3: q.q3,
        max_impact: impacts[n - 1],
        outliers,
        histogram,
        median_participation: median(episodes.iter().map(|e| e.participation)).expect("non-empty"),
        mean_duration_s: durations.iter().sum::<f64>() / n as f64,
        mean_duration_trimmed_s: kept.iter().sum::<f64>() / kept.len() as f64,
        median_duration_s: dq.median,
        zero_time_fraction: zero as f64 / n as f64,
    }
}

pub fn write_bins_csv<W: io::Write>(out: W, bins: &[VolumeBinStats]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if bins.is_empty() {
        w.write_record(BIN_COLUMNS)?;
    }
    for b in bins {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bins_csv<R: io::Read>(input: R) -> csv::Result<Vec<VolumeBinStats>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

const BIN_COLUMNS: [&str; 18] = [
    "v",
    "V_T",
    "n",
    "low_count",
    "mean_impact",
    "sd_impact",
    "min_impact",
    "q1",
    "median",
    "q3",
    "max_impact",
    "outliers",
    "histogram",
    "median_participation",
    "mean_duration_s",
    "mean_duration_trimmed_s",
    "median_duration_s",
    "zero_time_fraction",
];

mod list {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        s.serialize_str(&parts.join(";"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let s = String::deserialize(d)?;
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(';')
            .map(|p| p.parse::<f64>().map_err(D::Error::custom))
            .collect()
    }
}

mod histogram {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(h: &BTreeMap<i64, u64>, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = h
            .iter()
            .map(|(k, c)| format!("{}:{}", *k as f64 / 2.0, c))
            .collect();
        s.serialize_str(&parts.join(";"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, u64>, D::Error> {
        let s = String::deserialize(d)?;
        let mut h = BTreeMap::new();
        if s.is_empty() {
            return Ok(h);
        }
        for part in s.split(';') {
            let (k, c) = part
                .split_once(':')
                .ok_or_else(|| D::Error::custom(format!("bad histogram entry `{part}`")))?;
            let k: f64 = k.parse().map_err(D::Error::custom)?;
            let c: u64 = c.parse().map_err(D::Error::custom)?;
            h.insert((k * 2.0).round() as i64, c);
        }
        Ok(h)
    }
}
