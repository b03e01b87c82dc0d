use std::io;

use serde::{Deserialize, Serialize};

use super::summary::{RegressionSummary, CONCAVE_INTERCEPT};
use crate::price::Price;

pub const TABLE_HEADER: [&str; 9] = [
    "RIC",
    "touch",
    "delta",
    "mu",
    "lambda",
    "lambda_err_pct",
    "r2",
    "p_value",
    "part_rate",
];

/// One instrument row of the multi-instrument table. Percentages are in
/// percent; missing values are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(rename = "RIC")]
    pub ric: String,
    pub touch: f64,
    pub delta: f64,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_err_pct: Option<f64>,
    pub r2: Option<f64>,
    pub p_value: Option<f64>,
    pub part_rate: Option<f64>,
}

impl ReportRow {
    pub fn from_summary(s: &RegressionSummary) -> Self {
        ReportRow {
            ric: s.instrument.clone(),
            touch: s.touch_volume,
            delta: s.tick_size,
            mu: s.mu,
            lambda: s.lambda,
            lambda_err_pct: s.lambda_err_pct,
            r2: s.r2,
            p_value: s.p_value,
            part_rate: s.participation_asymptote.map(|p| p * 100.0),
        }
    }

    /// Intercept above the concavity threshold.
    pub fn is_concave(&self) -> bool {
        self.mu.is_some_and(|mu| mu > CONCAVE_INTERCEPT)
    }

    fn cells(&self) -> [String; 9] {
        let fixed = |x: Option<f64>, d: usize| x.map_or(String::new(), |x| format!("{x:.d$}"));
        [
            self.ric.clone(),
            format!("{:.1}", self.touch),
            format!("{:.*}", Price::from_f64(self.delta).decimals(), self.delta),
            fixed(self.mu, 4),
            fixed(self.lambda, 4),
            fixed(self.lambda_err_pct, 1),
            fixed(self.r2, 4),
            self.p_value.map_or(String::new(), |p| format!("{p:.2e}")),
            fixed(self.part_rate, 1),
        ]
    }
}

/// Writes the table with fixed per-column precision.
pub fn write_report_table<W: io::Write>(out: W, rows: &[ReportRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_table<R: io::Read>(input: R) -> csv::Result<Vec<ReportRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
