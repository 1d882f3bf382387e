//! Experiment pipeline, report types and plot-data export used by the CLI.

mod config;
mod plot;
mod report;

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{ClassifyPolicy, ExperimentConfig, LoopSource, OutputFormat};
pub use plot::{emit_plot_data, gap_histogram_csv, write_plot_data, PlotKind};
pub use report::{
    run_experiment, run_gaps, run_phases, Check, CoherentSection, CorrelationPoint, EmpiricalGaps,
    ExperimentReport, GapSection, HitCorrelation, OrbitPoint, PhaseLevel, PhaseReport,
    PhaseSection, RevivalCondition, RotationSection, MAX_REPORTED_HITS,
};

/// Pipeline stage a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    PhaseGeometry,
    CoherentDynamics,
    RotationMap,
    GapStatistics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::PhaseGeometry => "phase_geometry",
            Stage::CoherentDynamics => "coherent_dynamics",
            Stage::RotationMap => "rotation_map",
            Stage::GapStatistics => "gap_statistics",
        })
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("[{stage}] {message}")]
    Stage { stage: Stage, message: String },
    #[error("plot: {0}")]
    Plot(String),
    #[error("serialization: {0}")]
    Serialize(String),
}

impl HarnessError {
    pub(crate) fn stage(stage: Stage, err: impl fmt::Display) -> Self {
        HarnessError::Stage {
            stage,
            message: err.to_string(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
