use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::phase_geometry::LoopDescriptor;
use crate::rotation::{DEFAULT_Q_MAX, DEFAULT_TOL};

/// A loop given inline or as a path to a loop-descriptor file. Relative
/// paths resolve against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LoopSource {
    Path(PathBuf),
    Inline(LoopDescriptor),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyPolicy {
    pub q_max: u64,
    pub tol: f64,
}

impl Default for ClassifyPolicy {
    fn default() -> Self {
        Self {
            q_max: DEFAULT_Q_MAX,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn default_series_cycles() -> u64 {
    100
}

fn default_orbit_samples() -> u64 {
    1000
}

/// One experiment: loops, oscillator and cycle parameters, window size and
/// simulation length. The pipeline has no random inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Displacement loop; absent means `𝒜 = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_loop: Option<LoopSource>,
    pub beta_loop: LoopSource,
    pub omega: f64,
    #[serde(rename = "cycle_period_T")]
    pub cycle_period_t: f64,
    /// Coherent amplitude as `[re, im]`.
    pub z: [f64; 2],
    pub epsilon: f64,
    pub iterations: u64,
    /// Cycles covered by the correlation series.
    #[serde(default = "default_series_cycles")]
    pub series_cycles: u64,
    /// Orbit points kept for the orbit-angles table.
    #[serde(default = "default_orbit_samples")]
    pub orbit_samples: u64,
    #[serde(default)]
    pub classify: ClassifyPolicy,
    /// Declared rotation number `[p, q]`, overriding detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_rational: Option<[i64; 2]>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            HarnessError::config(path, e.into_inner().to_string())
        })?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json_str(&text, base)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z[0], self.z[1])
    }

    /// Field-level validation beyond what the schema enforces.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(HarnessError::config(
                    name,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        };
        positive("omega", self.omega)?;
        positive("cycle_period_T", self.cycle_period_t)?;
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(HarnessError::config(
                "epsilon",
                format!("must lie in (0, 1/2), got {}", self.epsilon),
            ));
        }
        if self.iterations == 0 {
            return Err(HarnessError::config("iterations", "must be positive"));
        }
        if !(self.z[0].is_finite() && self.z[1].is_finite()) {
            return Err(HarnessError::config("z", "must be finite"));
        }
        if !(self.classify.tol > 0.0 && self.classify.q_max >= 1) {
            return Err(HarnessError::config(
                "classify",
                "need q_max >= 1 and tol > 0",
            ));
        }
        if let Some([_, q]) = self.declared_rational {
            if q <= 0 {
                return Err(HarnessError::config(
                    "declared_rational",
                    "denominator must be positive",
                ));
            }
        }
        Ok(())
    }

    /// Resolve a loop source into a descriptor, reading files as needed.
    pub fn resolve_loop(
        &self,
        field: &str,
        src: &LoopSource,
    ) -> Result<LoopDescriptor, HarnessError> {
        match src {
            LoopSource::Inline(d) => Ok(d.clone()),
            LoopSource::Path(p) => {
                let full = if p.is_absolute() {
                    p.clone()
                } else {
                    self.base_dir.join(p)
                };
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    HarnessError::config(field, format!("cannot read {}: {e}", full.display()))
                })?;
                let de = &mut serde_json::Deserializer::from_str(&text);
                serde_path_to_error::deserialize(de).map_err(|e| {
                    HarnessError::config(
                        format!("{field}({}).{}", full.display(), e.path()),
                        e.into_inner().to_string(),
                    )
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "beta_loop": {"primitive": {"name": "circle", "center": [0, 0], "radius": 0.5, "n_samples": 1000}},
        "omega": 1.0, "cycle_period_T": 20.0, "z": [1.0, 0.0], "epsilon": 0.1, "iterations": 1000
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json_str(MINIMAL, ".").unwrap();
        assert!(c.alpha_loop.is_none());
        assert_eq!(c.series_cycles, 100);
        assert_eq!(c.classify, ClassifyPolicy::default());
        c.validate().unwrap();
    }

    #[test]
    fn missing_beta_loop_names_the_field() {
        let text = r#"{"omega": 1.0, "cycle_period_T": 20.0, "z": [1, 0], "epsilon": 0.1, "iterations": 10}"#;
        let err = ExperimentConfig::from_json_str(text, ".").unwrap_err();
        assert!(err.to_string().contains("beta_loop"), "{err}");
    }

    #[test]
    fn nested_error_path() {
        let text = MINIMAL.replace("\"radius\": 0.5", "\"radius\": \"big\"");
        let err = ExperimentConfig::from_json_str(&text, ".").unwrap_err();
        let HarnessError::Config { path, .. } = err else {
            panic!("wrong error kind")
        };
        assert_eq!(path, "beta_loop");
    }

    #[test]
    fn range_validation() {
        let mut c = ExperimentConfig::from_json_str(MINIMAL, ".").unwrap();
        c.epsilon = 0.7;
        assert!(
            matches!(c.validate(), Err(HarnessError::Config { path, .. }) if path == "epsilon")
        );
        c.epsilon = 0.1;
        c.omega = -1.0;
        assert!(matches!(c.validate(), Err(HarnessError::Config { path, .. }) if path == "omega"));
    }

    #[test]
    fn loop_files_resolve_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("beta.json"),
            r#"{"points": [[0.1,0],[0,0.1],[-0.1,0]]}"#,
        )
        .unwrap();
        let text = MINIMAL.replace(
            r#"{"primitive": {"name": "circle", "center": [0, 0], "radius": 0.5, "n_samples": 1000}}"#,
            r#""beta.json""#,
        );
        let c = ExperimentConfig::from_json_str(&text, dir.path()).unwrap();
        let d = c.resolve_loop("beta_loop", &c.beta_loop).unwrap();
        assert_eq!(d.points.unwrap().len(), 3);
        let missing =
            ExperimentConfig::from_json_str(&text.replace("beta.json", "nope.json"), dir.path())
                .unwrap();
        assert!(missing
            .resolve_loop("beta_loop", &missing.beta_loop)
            .is_err());
    }
}
