use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use revival::harness::{
    emit_plot_data, gap_histogram_csv, run_experiment, run_gaps, run_phases, write_plot_data,
    Check, ExperimentConfig, ExperimentReport, GapSection, HarnessError, OutputFormat, PlotKind,
};
use revival::rotation::split_rotation_number;

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONTRACT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "revival",
    version,
    about = "Geometric-phase revivals and three-gap recurrence statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Loop areas and Berry phases of the lowest levels.
    Phases {
        #[command(flatten)]
        common: Common,
        /// Number of levels to tabulate, starting at n = 0.
        #[arg(long, default_value_t = 5)]
        levels: u64,
    },
    /// Full pipeline: phases, correlations, rotation map, gap statistics.
    Revivals {
        #[command(flatten)]
        common: Common,
        /// Declare the rotation number exactly, as `p/q`.
        #[arg(long, value_parser = parse_ratio)]
        rational: Option<[i64; 2]>,
    },
    /// Analytic and empirical return-time distribution for given δ and ε.
    Gaps {
        #[command(flatten)]
        common: Common,
        /// Fractional rotation δ in (0, 1). Taken from the config if absent.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Export a series from a saved report as CSV.
    Plot {
        /// Report JSON written by `revivals`.
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        /// Output directory; prints to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Output directory; prints to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

impl Common {
    fn load_config(&self) -> Result<ExperimentConfig, HarnessError> {
        let path = self.config.as_ref().ok_or_else(|| HarnessError::Config {
            path: "--config".into(),
            message: "required for this subcommand".into(),
        })?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(n) = self.iterations {
            cfg.iterations = n;
        }
        Ok(cfg)
    }
}

fn parse_ratio(s: &str) -> Result<[i64; 2], String> {
    let (p, q) = s.split_once('/').ok_or("expected p/q")?;
    let p = p.trim().parse().map_err(|e| format!("numerator: {e}"))?;
    let q: i64 = q.trim().parse().map_err(|e| format!("denominator: {e}"))?;
    if q <= 0 {
        return Err("denominator must be positive".into());
    }
    Ok([p, q])
}

enum Failure {
    Validation(HarnessError),
    Contract(Vec<String>),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Validation(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| HarnessError::Serialize(e.to_string()))
}

/// Write `text` to `out/name`, or to stdout without `--out`.
fn emit(out: Option<&Path>, name: &str, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(io_err(&path))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn check_outcome(checks: &[Check]) -> Result<(), Failure> {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {} (limit {})", c.name, c.value, c.limit))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Contract(failed))
    }
}

fn cmd_phases(common: &Common, levels: u64) -> Result<(), Failure> {
    let cfg = common.load_config()?;
    let report = run_phases(&cfg, levels)?;
    match common.format {
        OutputFormat::Json => emit(common.out.as_deref(), "phases.json", &to_json(&report)?)?,
        OutputFormat::Csv => {
            let mut text = String::from("n,gamma_n\n");
            for l in &report.levels {
                text.push_str(&format!("{},{}\n", l.n, l.gamma));
            }
            emit(common.out.as_deref(), "phases.csv", &text)?;
        }
    }
    check_outcome(&report.checks)
}

fn cmd_revivals(common: &Common, rational: Option<[i64; 2]>) -> Result<(), Failure> {
    let mut cfg = common.load_config()?;
    if rational.is_some() {
        cfg.declared_rational = rational;
    }
    let report = run_experiment(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match common.format {
        OutputFormat::Json => emit(common.out.as_deref(), "report.json", &to_json(&report)?)?,
        OutputFormat::Csv => emit_all_csv(&report, common.out.as_deref())?,
    }
    check_outcome(&report.checks)
}

fn emit_all_csv(report: &ExperimentReport, out: Option<&Path>) -> Result<(), HarnessError> {
    for kind in [
        PlotKind::CorrelationSeries,
        PlotKind::GapHistogram,
        PlotKind::OrbitAngles,
    ] {
        match emit_plot_data(report, kind) {
            Ok(text) => emit(out, kind.file_name(), &text)?,
            Err(HarnessError::Plot(msg)) => eprintln!("skipping {}: {msg}", kind.file_name()),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GapsOutput<'a> {
    gaps: &'a GapSection,
    checks: &'a [Check],
}

fn cmd_gaps(common: &Common, delta: Option<f64>) -> Result<(), Failure> {
    let (delta, epsilon, iterations) = match delta {
        Some(d) => {
            let epsilon = common.epsilon.ok_or_else(|| HarnessError::Config {
                path: "--epsilon".into(),
                message: "required with --delta".into(),
            })?;
            let iterations = common.iterations.unwrap_or(1_000_000);
            (d, epsilon, iterations)
        }
        None => {
            let cfg = common.load_config()?;
            let report = run_phases(&cfg, 0)?;
            let rn =
                (cfg.omega * cfg.cycle_period_t + report.phases.area_b) / std::f64::consts::TAU;
            (split_rotation_number(rn).1, cfg.epsilon, cfg.iterations)
        }
    };
    let (section, checks) = run_gaps(delta, epsilon, iterations)?;
    match common.format {
        OutputFormat::Json => emit(
            common.out.as_deref(),
            "gaps.json",
            &to_json(&GapsOutput {
                gaps: &section,
                checks: &checks,
            })?,
        )?,
        OutputFormat::Csv => {
            let text = gap_histogram_csv(&section)?;
            emit(common.out.as_deref(), "gap_histogram.csv", &text)?;
        }
    }
    check_outcome(&checks)
}

fn cmd_plot(report: &Path, kind: PlotKind, out: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(report).map_err(io_err(report))?;
    let report: ExperimentReport =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config {
            path: report.display().to_string(),
            message: e.to_string(),
        })?;
    match out {
        Some(dir) => {
            let path = write_plot_data(&report, kind, dir)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", emit_plot_data(&report, kind)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Phases { common, levels } => cmd_phases(common, *levels),
        Command::Revivals { common, rational } => cmd_revivals(common, *rational),
        Command::Gaps { common, delta } => cmd_gaps(common, *delta),
        Command::Plot { report, kind, out } => cmd_plot(report, *kind, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Contract(failed)) => {
            for f in failed {
                eprintln!("contract violation: {f}");
            }
            ExitCode::from(EXIT_CONTRACT)
        }
    }
}
