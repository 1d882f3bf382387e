use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::report::{ExperimentReport, GapSection};
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    CorrelationSeries,
    GapHistogram,
    OrbitAngles,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::CorrelationSeries => "correlation_series.csv",
            PlotKind::GapHistogram => "gap_histogram.csv",
            PlotKind::OrbitAngles => "orbit_angles.csv",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "correlation-series" => Ok(PlotKind::CorrelationSeries),
            "gap-histogram" => Ok(PlotKind::GapHistogram),
            "orbit-angles" => Ok(PlotKind::OrbitAngles),
            other => Err(HarnessError::Plot(format!("unknown plot kind `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct HistogramRow {
    gap: u64,
    #[serde(rename = "analytic_F")]
    analytic_f: Option<f64>,
    empirical_frequency: f64,
}

#[derive(Serialize)]
struct CorrelationRow {
    k: u64,
    correlation_closed: f64,
    correlation_fock: f64,
    bound: f64,
}

#[derive(Serialize)]
struct OrbitRow {
    k: u64,
    theta_k: f64,
    is_hit: u8,
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| HarnessError::Serialize(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Serialize(e.to_string()))
}

/// Gap histogram rows: every observed or predicted gap, ascending.
pub fn gap_histogram_csv(g: &GapSection) -> Result<String, HarnessError> {
    let mut keys: BTreeSet<u64> = g.empirical.frequencies.keys().copied().collect();
    if let Some(d) = &g.analytic {
        keys.extend(d.gaps());
    }
    to_csv(keys.into_iter().map(|gap| HistogramRow {
        gap,
        analytic_f: g.analytic.as_ref().map(|d| d.probability_of(gap)),
        empirical_frequency: g.empirical.frequencies.get(&gap).copied().unwrap_or(0.0),
    }))
}

/// Render one series of a report as CSV with a one-line header.
pub fn emit_plot_data(report: &ExperimentReport, kind: PlotKind) -> Result<String, HarnessError> {
    match kind {
        PlotKind::CorrelationSeries => {
            if report.coherent.series.is_empty() {
                return Err(HarnessError::Plot(
                    "report has no correlation series".into(),
                ));
            }
            to_csv(report.coherent.series.iter().map(|p| CorrelationRow {
                k: p.k,
                correlation_closed: p.correlation_closed,
                correlation_fock: p.correlation_fock,
                bound: p.bound,
            }))
        }
        PlotKind::GapHistogram => {
            let g = report
                .gaps
                .as_ref()
                .ok_or_else(|| HarnessError::Plot("report has no gap statistics".into()))?;
            gap_histogram_csv(g)
        }
        PlotKind::OrbitAngles => {
            let orbit = report
                .orbit
                .as_ref()
                .ok_or_else(|| HarnessError::Plot("report has no orbit simulation".into()))?;
            to_csv(orbit.iter().map(|p| OrbitRow {
                k: p.k,
                theta_k: p.theta,
                is_hit: p.is_hit as u8,
            }))
        }
    }
}

/// Write a series into `dir` under its default file name.
pub fn write_plot_data(
    report: &ExperimentReport,
    kind: PlotKind,
    dir: &Path,
) -> Result<PathBuf, HarnessError> {
    let text = emit_plot_data(report, kind)?;
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(kind.file_name());
    std::fs::write(&path, text).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
