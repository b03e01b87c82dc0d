use std::fs::File;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::imbalance::{
    volume_grid, ConfigError, EpisodeRecord, ExtractionConfig, FusedScanner, ScanCounters,
};
use crate::market_data::{
    EventReader, Level1Event, ParseError, SessionDescriptor, TouchAccumulator, TouchError,
};
use crate::stats::{
    aggregate_bins, fit_linear_with, participation_curve, FitPoint, ParticipationCurve,
    RegressionResult, VolumeBinStats, Weighting, DEFAULT_MIN_COUNT,
};

/// Knobs of one analysis run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub v_step: f64,
    pub v_max: f64,
    pub overshoot_tol: f64,
    pub min_count: usize,
    pub weighting: Weighting,
    pub require_post_quote: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            v_step: 0.25,
            v_max: 5.0,
            overshoot_tol: 0.1,
            min_count: DEFAULT_MIN_COUNT,
            weighting: Weighting::Unweighted,
            require_post_quote: true,
        }
    }
}

impl AnalysisOptions {
    pub fn grid(&self) -> Vec<f64> {
        volume_grid(self.v_step, self.v_max)
    }

    fn extraction(&self, touch_volume: f64) -> Result<ExtractionConfig, ConfigError> {
        let cfg = ExtractionConfig {
            overshoot_tol: self.overshoot_tol,
            v_grid: self.grid(),
            touch_volume,
            require_post_quote: self.require_post_quote,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the options that do not depend on the data.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.extraction(1.0).map(|_| ())
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("cannot open {path}: {source}")]
    Open { path: String, source: io::Error },
}

/// Everything the analysis of one session produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub descriptor: SessionDescriptor,
    pub options: AnalysisOptions,
    /// Time-weighted touch volume; 0 when the session has no valid quote.
    pub touch_volume: f64,
    pub counters: ScanCounters,
    pub records: Vec<EpisodeRecord>,
    pub dropped_no_post_quote: u64,
    pub bins: Vec<VolumeBinStats>,
    pub fit: Option<RegressionResult>,
    /// Why there is no fit.
    pub fit_failure: Option<String>,
    pub participation: Option<ParticipationCurve>,
    pub warnings: Vec<String>,
}

impl Analysis {
    fn empty(
        desc: &SessionDescriptor,
        options: &AnalysisOptions,
        counters: ScanCounters,
        reason: &str,
    ) -> Self {
        Analysis {
            descriptor: desc.clone(),
            options: options.clone(),
            touch_volume: 0.0,
            counters,
            records: Vec::new(),
            dropped_no_post_quote: 0,
            bins: Vec::new(),
            fit: None,
            fit_failure: Some(reason.to_string()),
            participation: None,
            warnings: vec![reason.to_string()],
        }
    }

    fn from_scan(
        desc: &SessionDescriptor,
        options: &AnalysisOptions,
        touch_volume: f64,
        scan: Collector,
    ) -> Self {
        let Collector {
            scanner,
            grid_v,
            mut per_grid,
        } = scan;
        let mut out = scanner.finish();
        let mut dropped = 0;
        for ((g, records), &v) in out.grid.iter_mut().zip(per_grid.iter_mut()).zip(&grid_v) {
            dropped += g.dropped_no_post_quote;
            records.extend(
                g.episodes
                    .drain(..)
                    .map(|e| EpisodeRecord::from_episode(v, &e)),
            );
        }
        // moved grid by grid so that at most one grid is held twice
        let mut records = Vec::new();
        for g in per_grid {
            records.extend(g);
        }

        let bins = aggregate_bins(&records, options.min_count);
        let eligible: Vec<VolumeBinStats> = bins.iter().filter(|b| !b.low_count).cloned().collect();
        let points: Vec<FitPoint> = eligible.iter().map(FitPoint::from).collect();
        let (fit, fit_failure) = match fit_linear_with(&points, options.weighting) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let participation = participation_curve(if eligible.is_empty() {
            &bins
        } else {
            &eligible
        });

        let mut warnings = Vec::new();
        if out.counters.trades == 0 {
            warnings.push("session contains no trades".to_string());
        } else if records.is_empty() {
            warnings.push("no imbalance episode completed".to_string());
        }
        if let Some(reason) = &fit_failure {
            warnings.push(format!("no regression: {reason}"));
        }
        Analysis {
            descriptor: desc.clone(),
            options: options.clone(),
            touch_volume,
            counters: out.counters,
            records,
            dropped_no_post_quote: dropped,
            bins,
            fit,
            fit_failure,
            participation,
            warnings,
        }
    }

    pub fn accepted_episodes(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }
}

/// Fused scanner whose completed episodes are moved into per-grid records
/// every few thousand events.
struct Collector {
    scanner: FusedScanner,
    grid_v: Vec<f64>,
    per_grid: Vec<Vec<EpisodeRecord>>,
}

const DRAIN_EVERY: u64 = 1 << 16;

impl Collector {
    fn new(desc: &SessionDescriptor, cfg: &ExtractionConfig) -> Self {
        Collector {
            scanner: FusedScanner::new(desc, cfg),
            grid_v: cfg.v_grid.clone(),
            per_grid: vec![Vec::new(); cfg.v_grid.len()],
        }
    }

    fn push(&mut self, e: &Level1Event) {
        self.scanner.push(e);
        if self.scanner.counters().events.is_multiple_of(DRAIN_EVERY) {
            let (grid_v, per_grid) = (&self.grid_v, &mut self.per_grid);
            self.scanner.drain_episodes(|i, ep| {
                per_grid[i].push(EpisodeRecord::from_episode(grid_v[i], &ep))
            });
        }
    }
}

fn count_only(events: u64, trades: u64) -> ScanCounters {
    ScanCounters {
        events,
        trades,
        quotes: events - trades,
        ..ScanCounters::default()
    }
}

/// Analyzes an in-memory session.
pub fn analyze_events(
    events: &[Level1Event],
    desc: &SessionDescriptor,
    options: &AnalysisOptions,
) -> Result<Analysis, AnalysisError> {
    options.validate()?;
    let mut touch = TouchAccumulator::new(desc);
    for e in events {
        touch.observe(e);
    }
    let touch_volume = match touch.finish() {
        Ok(t) => t,
        Err(TouchError::EmptySession) => {
            let trades = events.iter().filter(|e| e.is_trade()).count() as u64;
            return Ok(Analysis::empty(
                desc,
                options,
                count_only(events.len() as u64, trades),
                "session has no valid quote",
            ));
        }
    };
    let cfg = options.extraction(touch_volume)?;
    let mut scan = Collector::new(desc, &cfg);
    for e in events {
        scan.push(e);
    }
    Ok(Analysis::from_scan(desc, options, touch_volume, scan))
}

fn open_events(
    path: &Path,
    desc: &SessionDescriptor,
) -> Result<EventReader<BufReader<File>>, AnalysisError> {
    let file = File::open(path).map_err(|source| AnalysisError::Open {
        path: path.display().to_string(),
        source,
    })?;
    Ok(EventReader::new(
        BufReader::with_capacity(1 << 20, file),
        desc.tick(),
    ))
}

/// Analyzes a tick file in two streaming passes: the touch volume first, then
/// the fused scan. Memory use does not grow with the file.
pub fn analyze_file(
    path: &Path,
    desc: &SessionDescriptor,
    options: &AnalysisOptions,
) -> Result<Analysis, AnalysisError> {
    options.validate()?;
    let parse_err = |source| AnalysisError::Parse {
        path: path.display().to_string(),
        source,
    };

    let mut touch = TouchAccumulator::new(desc);
    let (mut events, mut trades) = (0u64, 0u64);
    for item in open_events(path, desc)? {
        let e = item.map_err(parse_err)?;
        events += 1;
        trades += e.is_trade() as u64;
        touch.observe(&e);
    }
    let touch_volume = match touch.finish() {
        Ok(t) => t,
        Err(TouchError::EmptySession) => {
            return Ok(Analysis::empty(
                desc,
                options,
                count_only(events, trades),
                "session has no valid quote",
            ))
        }
    };

    let cfg = options.extraction(touch_volume)?;
    let mut scan = Collector::new(desc, &cfg);
    for item in open_events(path, desc)? {
        scan.push(&item.map_err(parse_err)?);
    }
    Ok(Analysis::from_scan(desc, options, touch_volume, scan))
}

/// File names of the artifacts written by [`write_artifacts`].
pub const BINS_FILE: &str = "bins.csv";
pub const EPISODES_FILE: &str = "episodes.csv";
pub const SUMMARY_FILE: &str = "regression.txt";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

/// Writes the bins CSV, the episode dump and the regression summary into `dir`.
pub fn write_artifacts(dir: &Path, analysis: &Analysis) -> Result<(), ArtifactError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ArtifactError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;

    let bins_path = dir.join(BINS_FILE);
    let f = File::create(&bins_path).map_err(io_err(&bins_path))?;
    crate::stats::write_bins_csv(io::BufWriter::new(f), &analysis.bins).map_err(|source| {
        ArtifactError::Csv {
            path: bins_path,
            source,
        }
    })?;

    let ep_path = dir.join(EPISODES_FILE);
    let f = File::create(&ep_path).map_err(io_err(&ep_path))?;
    crate::imbalance::write_episode_dump(io::BufWriter::new(f), &analysis.records).map_err(
        |source| ArtifactError::Csv {
            path: ep_path,
            source,
        },
    )?;

    let summary_path = dir.join(SUMMARY_FILE);
    let text = super::RegressionSummary::from_analysis(analysis).to_text();
    std::fs::write(&summary_path, text).map_err(io_err(&summary_path))?;
    Ok(())
}
