use std::io;

use serde::{Deserialize, Serialize};

use super::config::InformedStyle;
use crate::market_data::Timestamp;

/// What the informed trader actually did in one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub episode_id: u64,
    pub t_start_ns: Timestamp,
    pub t_end_ns: Timestamp,
    #[serde(rename = "V_T")]
    pub volume: u64,
    pub style: InformedStyle,
    /// Informed volume over all volume traded between start and end.
    pub true_participation: f64,
}

/// One record per completed informed episode. An episode still running at
/// the session end is not recorded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub records: Vec<TruthRecord>,
}

impl GroundTruth {
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.records.is_empty() {
            w.write_record([
                "episode_id",
                "t_start_ns",
                "t_end_ns",
                "V_T",
                "style",
                "true_participation",
            ])?;
        }
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(input: R) -> csv::Result<Self> {
        let records = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<csv::Result<Vec<TruthRecord>>>()?;
        Ok(GroundTruth { records })
    }
}
