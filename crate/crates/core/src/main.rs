use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trade_imbalance::market_data::SessionDescriptor;
use trade_imbalance::report::{
    analyze_file, write_artifacts, write_report_table, Analysis, AnalysisError, AnalysisOptions,
    RegressionSummary, ReportRow, SUMMARY_FILE,
};
use trade_imbalance::sim::{write_session, SimConfig, SimError};
use trade_imbalance::stats::Weighting;

const SESSION_FILE: &str = "session.csv";
const DESCRIPTOR_FILE: &str = "session.desc";
const TRUTH_FILE: &str = "truth.csv";

#[derive(Parser)]
#[command(
    name = "trade-imbalance",
    version,
    about = "Trade-imbalance market impact analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic session and its ground truth.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract imbalance episodes from a tick file and fit the impact line.
    Analyze {
        #[arg(long)]
        ticks: PathBuf,
        #[arg(long)]
        desc: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        v_max: f64,
        #[arg(long, default_value_t = 0.25)]
        v_step: f64,
        #[arg(long, default_value_t = 0.1)]
        overshoot: f64,
        /// Bins with fewer accepted episodes are reported but not fitted.
        #[arg(long, default_value_t = 30)]
        min_count: usize,
        /// Weight the fit by bin episode counts.
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Collect analysis outputs into one table, one row per instrument.
    Report {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure of a command, mapped onto the process exit code.
enum Failure {
    Config(String),
    Data(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Output(_) => 1,
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Data(m) | Failure::Output(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Analyze {
            ticks,
            desc,
            v_max,
            v_step,
            overshoot,
            min_count,
            weighted,
            out,
        } => {
            let options = AnalysisOptions {
                v_step,
                v_max,
                overshoot_tol: overshoot,
                min_count,
                weighting: if weighted {
                    Weighting::ByCount
                } else {
                    Weighting::Unweighted
                },
                ..AnalysisOptions::default()
            };
            analyze(&ticks, &desc, &options, &out)
        }
        Command::Report { inputs, out } => report(&inputs, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Output(format!("{}: {e}", path.display()))
}

fn simulate(config: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = SimConfig::load(config).map_err(|e| Failure::Config(e.to_string()))?;
    fs::create_dir_all(out).map_err(|e| output_err(out, e))?;

    let session_path = out.join(SESSION_FILE);
    let file = File::create(&session_path).map_err(|e| output_err(&session_path, e))?;
    let result =
        write_session(&cfg, BufWriter::with_capacity(1 << 20, file)).map_err(|e| match e {
            SimError::Io(e) => output_err(&session_path, e),
            other => Failure::Config(other.to_string()),
        })?;

    let desc_path = out.join(DESCRIPTOR_FILE);
    fs::write(&desc_path, result.descriptor.to_toml()).map_err(|e| output_err(&desc_path, e))?;
    let truth_path = out.join(TRUTH_FILE);
    let file = File::create(&truth_path).map_err(|e| output_err(&truth_path, e))?;
    result
        .truth
        .write_csv(BufWriter::new(file))
        .map_err(|e| output_err(&truth_path, e))?;

    let s = &result.stats;
    println!(
        "simulated {}: {} events ({} trades, {} quotes), volume {} (informed {}), {} informed episodes",
        result.descriptor.instrument,
        s.events,
        s.trades,
        s.quotes,
        s.executed_volume,
        s.informed_volume,
        result.truth.records.len()
    );
    Ok(())
}

fn analyze(
    ticks: &Path,
    desc: &Path,
    options: &AnalysisOptions,
    out: &Path,
) -> Result<(), Failure> {
    let descriptor = SessionDescriptor::load(desc).map_err(|e| Failure::Config(e.to_string()))?;
    let analysis = analyze_file(ticks, &descriptor, options).map_err(|e| match e {
        AnalysisError::Parse { .. } => Failure::Data(e.to_string()),
        AnalysisError::Config(_) | AnalysisError::Open { .. } => Failure::Config(e.to_string()),
    })?;
    write_artifacts(out, &analysis).map_err(|e| Failure::Output(e.to_string()))?;
    print_analysis(&analysis);
    Ok(())
}

fn print_analysis(a: &Analysis) {
    for w in &a.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: {} events, {} trades, touch volume {:.2}, {} episodes ({} accepted), {} bins",
        a.descriptor.instrument,
        a.counters.events,
        a.counters.trades,
        a.touch_volume,
        a.records.len(),
        a.accepted_episodes(),
        a.bins.len()
    );
    if let Some(fit) = &a.fit {
        println!(
            "I = {:.4} + {:.4} v  (R2 {:.4}, p {:.2e}, {} bins)",
            fit.intercept, fit.slope, fit.r_squared, fit.p_value, fit.points
        );
        println!(
            "lambda_err = {:.1}% against the half-tick estimate",
            fit.lambda_error_pct()
        );
    }
    if let Some(p) = &a.participation {
        println!("participation asymptote = {:.1}%", p.asymptote * 100.0);
    }
}

fn report(inputs: &[PathBuf], out: &Path) -> Result<(), Failure> {
    let mut rows = Vec::with_capacity(inputs.len());
    for dir in inputs {
        let path = dir.join(SUMMARY_FILE);
        let text = fs::read_to_string(&path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let summary = RegressionSummary::from_text(&text)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        rows.push(ReportRow::from_summary(&summary));
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| output_err(parent, e))?;
    }
    let file = File::create(out).map_err(|e| output_err(out, e))?;
    write_report_table(BufWriter::new(file), &rows).map_err(|e| output_err(out, e))?;
    for r in &rows {
        let lambda = r.lambda.map_or("-".to_string(), |l| format!("{l:.2}"));
        let flag = if r.is_concave() { "  [concave]" } else { "" };
        println!("{:<10} lambda {lambda}{flag}", r.ric);
    }
    Ok(())
}
