use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tubetail_core::{ConfigurationSpec, Method, PointConfiguration, RadialLaw};

use crate::CliError;

/// Inclusive threshold grid `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::validation("grid bounds must be finite"));
        }
        if self.step <= 0.0 {
            return Err(CliError::validation(format!("grid step must be positive, got {}", self.step)));
        }
        if self.start >= self.stop {
            return Err(CliError::validation(format!(
                "grid start ({}) must be below stop ({})",
                self.start, self.stop
            )));
        }
        if self.start <= 0.0 {
            return Err(CliError::validation(format!("grid start must be positive, got {}", self.start)));
        }
        if (self.stop - self.start) / self.step > 1e6 {
            return Err(CliError::validation("grid has more than a million points"));
        }
        Ok(())
    }

    /// Grid values, each computed as `start + k·step` so no rounding accumulates.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        self.validate()?;
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:STOP:STEP, got `{s}`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad grid value `{p}`: {e}"));
        Ok(GridSpec { start: num(parts[0])?, stop: num(parts[1])?, step: num(parts[2])? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    pub target: f64,
    #[serde(default = "default_method")]
    pub method: Method,
}

fn default_method() -> Method {
    Method::Exact
}

/// Experiment description read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub configuration: ConfigurationSpec,
    pub law: RadialLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdSpec>,
}

fn default_trials() -> u64 {
    tubetail_core::montecarlo::DEFAULT_TRIALS
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::validation(format!("{}: {}", path.display(), e.message())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::validation(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials < 1 {
            return Err(CliError::validation("trials must be at least 1"));
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        self.configuration.build().map_err(|e| CliError::validation(format!("invalid configuration: {e}")))?;
        Ok(())
    }

    pub fn build_configuration(&self) -> Result<PointConfiguration, CliError> {
        self.configuration.build().map_err(|e| CliError::validation(format!("invalid configuration: {e}")))
    }
}
