//! Session analysis pipeline, on-disk artifacts and the multi-instrument table.

mod analysis;
mod summary;
mod table;

pub use analysis::{
    analyze_events, analyze_file, write_artifacts, Analysis, AnalysisError, AnalysisOptions,
    ArtifactError, BINS_FILE, EPISODES_FILE, SUMMARY_FILE,
};
pub use summary::{RegressionSummary, SummaryError, CONCAVE_INTERCEPT};
pub use table::{read_report_table, write_report_table, ReportRow, TABLE_HEADER};
