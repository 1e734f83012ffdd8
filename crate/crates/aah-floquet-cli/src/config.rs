//! Experiment configuration: JSON in, validated parameters out.
//!
//! Rationals are serialized as strings ("3/1", "2/5") to keep frequency
//! ratios exact; all other quantities are dimensionless floats.

use aah_floquet::{ModelParams, PropagatorSettings, Ratio};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Bands,
    Chern,
    Obc,
    Pump,
    Momentum,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Task::Bands => "bands",
            Task::Chern => "chern",
            Task::Obc => "obc",
            Task::Pump => "pump",
            Task::Momentum => "momentum",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_j")]
    pub hopping: f64,
    #[serde(default = "default_j")]
    pub drive_amplitude: f64,
    pub drive_period: f64,
    /// ω_F/Ω as "a/b"; "0/1" switches the tilt off.
    #[serde(default = "default_zero_ratio")]
    pub tilt_ratio: String,
    #[serde(default)]
    pub interaction: f64,
    /// λ = 2π·p/q as "p/q".
    #[serde(default = "default_superlattice")]
    pub superlattice: String,
    #[serde(default)]
    pub beta: f64,
}

fn default_j() -> f64 {
    2.5
}

fn default_zero_ratio() -> String {
    "0/1".into()
}

fn default_superlattice() -> String {
    "1/3".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Unit cells of the periodic construction ring.
    pub cells: usize,
    pub particles: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    /// Time slices per common period; `null` uses 64·b·max(a,1).
    #[serde(default)]
    pub slices_per_period: Option<usize>,
    /// (n_beta, n_phi) for the bands task; n_phi = 1 yields a φ = 0 cut.
    #[serde(default = "default_band_grid")]
    pub band_grid: (usize, usize),
    /// (n_beta, n_phi) for the chern task; `null` picks 24×24 (N=1) or
    /// 16×16 (N=2).
    #[serde(default)]
    pub chern_grid: Option<(usize, usize)>,
    /// Double the chern grid until the integers stabilize.
    #[serde(default)]
    pub auto_refine: bool,
    #[serde(default = "default_gap_floor")]
    pub gap_floor: f64,
    /// "auto" or explicit groups as [start, end) pairs.
    #[serde(default)]
    pub groups: Option<Vec<(usize, usize)>>,
    /// β points for the obc task.
    #[serde(default = "default_beta_points")]
    pub beta_points: usize,
    /// Open-chain cells for the obc task.
    #[serde(default = "default_open_cells")]
    pub open_cells: usize,
    /// Pump periods M (or evolution periods for the momentum task).
    #[serde(default = "default_periods")]
    pub periods: usize,
    #[serde(default)]
    pub band: usize,
    #[serde(default = "default_initial")]
    pub initial: String,
    /// Gaussian width: in quasimomentum for the pump task, in real-space
    /// cells for the momentum task.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Packet center cell; `null` centers it on the ring.
    #[serde(default)]
    pub r0: Option<usize>,
    /// Open evolution lattice cells; `null` auto-sizes.
    #[serde(default)]
    pub embed_cells: Option<usize>,
    #[serde(default)]
    pub chern_hint: Option<f64>,
    #[serde(default = "default_dimension_cap")]
    pub dimension_cap: usize,
}

fn default_band_grid() -> (usize, usize) {
    (61, 61)
}

fn default_gap_floor() -> f64 {
    1e-6
}

fn default_beta_points() -> usize {
    61
}

fn default_open_cells() -> usize {
    30
}

fn default_periods() -> usize {
    2000
}

fn default_initial() -> String {
    "wannier".into()
}

fn default_sigma() -> f64 {
    0.7
}

fn default_dimension_cap() -> usize {
    aah_floquet::fock::DEFAULT_DIMENSION_CAP
}

impl Default for NumericsConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all numerics fields have defaults")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_format() -> String {
    "csv".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub model: ModelConfig,
    pub system: SystemConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

/// A field-level configuration problem.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError {
            field: "<json>".into(),
            message: e.to_string(),
        })
    }

    /// Validate and convert to model parameters; returns warnings for
    /// accepted-but-untested choices.
    pub fn to_params(&self) -> Result<(ModelParams, Vec<String>), ConfigError> {
        let mut warnings = Vec::new();
        if !(self.model.drive_period > 0.0) {
            return Err(ConfigError {
                field: "model.drive_period".into(),
                message: "must be positive".into(),
            });
        }
        let tilt = Ratio::parse(&self.model.tilt_ratio).map_err(|e| ConfigError {
            field: "model.tilt_ratio".into(),
            message: e.to_string(),
        })?;
        let superlattice = Ratio::parse(&self.model.superlattice).map_err(|e| ConfigError {
            field: "model.superlattice".into(),
            message: e.to_string(),
        })?;
        if superlattice.is_zero() {
            return Err(ConfigError {
                field: "model.superlattice".into(),
                message: "p/q must be a positive rational".into(),
            });
        }
        if superlattice.denominator() != 3 {
            warnings.push(format!(
                "superlattice q = {} is accepted but untested (reductions are exercised at q = 3)",
                superlattice.denominator()
            ));
        }
        if self.system.cells < 2 {
            return Err(ConfigError {
                field: "system.cells".into(),
                message: "need at least 2 unit cells".into(),
            });
        }
        if self.system.particles == 0 {
            return Err(ConfigError {
                field: "system.particles".into(),
                message: "need at least one particle".into(),
            });
        }
        let mut params = ModelParams::new(self.model.drive_period).map_err(|e| ConfigError {
            field: "model.drive_period".into(),
            message: e.to_string(),
        })?;
        params.hopping = self.model.hopping;
        params.drive_amplitude = self.model.drive_amplitude;
        params.tilt_ratio = tilt;
        params.interaction = self.model.interaction;
        params.superlattice = superlattice;
        params.beta = self.model.beta.rem_euclid(std::f64::consts::TAU);
        Ok((params, warnings))
    }

    pub fn propagator_settings(&self) -> PropagatorSettings {
        PropagatorSettings {
            slices_per_period: self.numerics.slices_per_period,
            ..Default::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let text = r#"{
            "task": "bands",
            "model": { "drive_period": 2.0, "tilt_ratio": "3/1" },
            "system": { "cells": 21, "particles": 1 },
            "output": { "dir": "out" }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let (params, warnings) = cfg.to_params().unwrap();
        assert!(warnings.is_empty());
        assert_eq!(params.hopping, 2.5);
        assert_eq!(params.tilt_ratio.numerator(), 3);
        assert_eq!(cfg.numerics.band_grid, (61, 61));
    }

    #[test]
    fn ratios_auto_reduce() {
        let text = r#"{
            "task": "chern",
            "model": { "drive_period": 4.0, "tilt_ratio": "4/10" },
            "system": { "cells": 5, "particles": 1 },
            "output": { "dir": "out" }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let (params, _) = cfg.to_params().unwrap();
        assert_eq!(
            (params.tilt_ratio.numerator(), params.tilt_ratio.denominator()),
            (2, 5)
        );
    }

    #[test]
    fn unusual_sublattice_warns() {
        let text = r#"{
            "task": "bands",
            "model": { "drive_period": 2.0, "superlattice": "1/4" },
            "system": { "cells": 5, "particles": 1 },
            "output": { "dir": "out" }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let (_, warnings) = cfg.to_params().unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn bad_fields_are_reported() {
        let text = r#"{
            "task": "bands",
            "model": { "drive_period": -1.0 },
            "system": { "cells": 5, "particles": 1 },
            "output": { "dir": "out" }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let err = cfg.to_params().unwrap_err();
        assert!(err.field.contains("drive_period"));
    }
}
