//! Scenario files: JSON, every field optional except `kind`.
//!
//! See the workspace README for the schema. Loading fills in defaults, applies
//! `key=value` overrides and validates every block the chosen kind uses.

use std::path::{Path, PathBuf};

use hylab::hybrid::ForceLaw;
use hylab::oracle::{OracleScenario, RelativeState};
use hylab::softcore::SoftCore;
use hylab::spectral::Grid1d;
use hylab::units::PROTON_ELECTRON_MASS_RATIO;
use hylab::{AtomParams, PacketSpec, Vec3, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("parse error in {origin} at `{field}`: {message}")]
    Parse { origin: String, field: String, message: String },

    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ConfigError {
    /// Dotted path of the offending field (empty for I/O errors).
    pub fn field(&self) -> &str {
        match self {
            ConfigError::Io { .. } => "",
            ConfigError::Parse { field, .. } | ConfigError::Validation { field, .. } => field,
        }
    }
}

fn validation(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    QuantumReference,
    Hybrid,
    Oracle,
    Compare,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::QuantumReference => "quantum-reference",
            ExperimentKind::Hybrid => "hybrid",
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HybridModel {
    /// 3-d circular packet over the hydrogen levels.
    Circular,
    /// 1-d electron in the soft-core potential of the proton.
    SoftCore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub n_bar: f64,
    pub sigma_n: f64,
    pub sigma_com: f64,
    /// Inclusive `[lo, hi]`; the ±8σ window when absent.
    pub window: Option<[u32; 2]>,
    /// Points per axis of the density planes (snapshots and heatmaps).
    pub plane_points: usize,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self {
            n_bar: PacketSpec::DEFAULT_N_BAR,
            sigma_n: PacketSpec::DEFAULT_SIGMA_N,
            sigma_com: PacketSpec::DEFAULT_SIGMA_COM,
            window: None,
            plane_points: 201,
        }
    }
}

impl PacketConfig {
    pub fn spec(&self) -> hylab::Result<PacketSpec> {
        let spec = PacketSpec::new(self.n_bar, self.sigma_n, self.sigma_com)?;
        match self.window {
            Some([lo, hi]) => spec.with_window(lo, hi),
            None => Ok(spec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridConfig {
    pub model: HybridModel,
    pub proton_position: [f64; 3],
    pub proton_momentum: [f64; 3],
    /// Steps per electron period; the module default for the law when absent.
    pub steps_per_period: Option<usize>,
    // soft-core model only
    pub softening: f64,
    pub grid_points: usize,
    pub half_width: f64,
    /// Amplitudes over the lowest soft-core levels, `[re, im]` pairs.
    pub coeffs: Vec<C64>,
}

impl Default for HybridConfig {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            model: HybridModel::Circular,
            proton_position: [0.0; 3],
            proton_momentum: [0.0; 3],
            steps_per_period: None,
            softening: 1.0,
            grid_points: 512,
            half_width: 40.0,
            coeffs: vec![C64::new(s, 0.0), C64::new(s, 0.0)],
        }
    }
}

impl HybridConfig {
    pub fn proton_position(&self) -> Vec3 {
        Vec3::from(self.proton_position)
    }

    pub fn proton_momentum(&self) -> Vec3 {
        Vec3::from(self.proton_momentum)
    }
}

fn physical_ratio() -> f64 {
    PROTON_ELECTRON_MASS_RATIO
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn adiabatic() -> ForceLaw {
    ForceLaw::AdiabaticGradient
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ExperimentKind,
    /// Proton/electron mass ratio of the 3-d packet and of the hybrid runs.
    /// Oracle and compare runs take `oracle.mass_ratio`.
    #[serde(default = "physical_ratio")]
    pub mass_ratio: f64,
    #[serde(default)]
    pub packet: PacketConfig,
    #[serde(default)]
    pub hybrid: HybridConfig,
    #[serde(default)]
    pub oracle: OracleScenario,
    #[serde(default = "adiabatic")]
    pub law: ForceLaw,
    /// Kepler periods (quantum-reference), electron periods (hybrid), or
    /// absolute time (oracle, compare). Filled in on load.
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Keep every `stride`-th sample.
    #[serde(default = "one")]
    pub stride: usize,
    /// Reserved; every run is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub snapshots: bool,
    #[serde(default = "yes")]
    pub plots: bool,
}

impl ScenarioConfig {
    /// Defaults for everything but the kind, without validation.
    pub fn with_kind(kind: ExperimentKind) -> Self {
        Self {
            kind,
            mass_ratio: physical_ratio(),
            packet: PacketConfig::default(),
            hybrid: HybridConfig::default(),
            oracle: OracleScenario::default(),
            law: adiabatic(),
            horizon: None,
            output_dir: None,
            stride: 1,
            seed: 0,
            snapshots: true,
            plots: true,
        }
    }

    pub fn params(&self) -> hylab::Result<AtomParams> {
        AtomParams::new(self.mass_ratio)
    }

    /// The oracle block with the horizon applied as its total time.
    pub fn oracle_scenario(&self) -> OracleScenario {
        let mut s = self.oracle.clone();
        if let Some(h) = self.horizon {
            s.total_time = h;
        }
        s
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs").join(self.kind.name()))
    }

    fn default_horizon(&self) -> f64 {
        match self.kind {
            // one full autocorrelation revival
            ExperimentKind::QuantumReference => 2.0 * self.packet.n_bar / 3.0,
            ExperimentKind::Hybrid => 10.0,
            ExperimentKind::Oracle | ExperimentKind::Compare => self.oracle.total_time,
        }
    }

    /// Fill the derived defaults so the echo is complete.
    pub fn resolve(mut self) -> Self {
        if self.horizon.is_none() {
            self.horizon = Some(self.default_horizon());
        }
        if self.output_dir.is_none() {
            self.output_dir = Some(self.output_dir());
        }
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.stride == 0 {
            return Err(validation("stride", "must be >= 1"));
        }
        match self.kind {
            ExperimentKind::QuantumReference => {
                self.validate_params()?;
                self.validate_packet()?;
                if self.packet.n_bar < 5.0 {
                    return Err(validation(
                        "packet.n_bar",
                        format!("time scales need n_bar >= 5, got {}", self.packet.n_bar),
                    ));
                }
            }
            ExperimentKind::Hybrid => {
                self.validate_params()?;
                self.validate_hybrid()?;
            }
            ExperimentKind::Oracle | ExperimentKind::Compare => {
                self.oracle_scenario().validate().map_err(|e| module_error("oracle", e))?;
                if self.kind == ExperimentKind::Compare && !matches!(self.oracle.relative, RelativeState::Bound { .. })
                {
                    return Err(validation("oracle.relative", "compare runs need a bound-state superposition"));
                }
            }
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) || !h.is_finite() {
                return Err(validation("horizon", format!("must be finite and > 0, got {h}")));
            }
        }
        Ok(())
    }

    fn validate_params(&self) -> Result<(), ConfigError> {
        self.params().map(|_| ()).map_err(|e| module_error("", e))
    }

    fn validate_packet(&self) -> Result<(), ConfigError> {
        if self.packet.plane_points < 3 {
            return Err(validation("packet.plane_points", "need at least 3 points per axis"));
        }
        self.packet.spec().map(|_| ()).map_err(|e| module_error("packet", e))
    }

    fn validate_hybrid(&self) -> Result<(), ConfigError> {
        let h = &self.hybrid;
        let finite = |v: &[f64; 3]| v.iter().all(|x| x.is_finite());
        if !finite(&h.proton_position) {
            return Err(validation("hybrid.proton_position", "must be finite"));
        }
        if !finite(&h.proton_momentum) {
            return Err(validation("hybrid.proton_momentum", "must be finite"));
        }
        if let Some(n) = h.steps_per_period {
            // the integrator refuses dt > period / 1000
            if n < 1000 {
                return Err(validation("hybrid.steps_per_period", format!("must be >= 1000, got {n}")));
            }
        }
        match h.model {
            HybridModel::Circular => {
                if self.law == ForceLaw::Ehrenfest {
                    return Err(validation("law", "the Ehrenfest law needs hybrid.model = \"soft-core\""));
                }
                self.validate_packet()
            }
            HybridModel::SoftCore => {
                SoftCore::new(h.softening).map_err(|e| module_error("hybrid", e))?;
                Grid1d::centered(h.grid_points, h.half_width)
                    .map_err(|e| validation("hybrid.grid_points", e.to_string()))?;
                if h.coeffs.is_empty() || h.coeffs.len() > h.grid_points / 4 {
                    return Err(validation("hybrid.coeffs", "need between 1 and grid_points/4 amplitudes"));
                }
                let norm: f64 = h.coeffs.iter().map(|c| c.norm_sqr()).sum();
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(validation("hybrid.coeffs", "amplitudes must be finite and not all zero"));
                }
                let y = &h.proton_position;
                if y[1] != 0.0 || y[2] != 0.0 || h.proton_momentum[1] != 0.0 || h.proton_momentum[2] != 0.0 {
                    return Err(validation(
                        "hybrid.proton_position",
                        "the soft-core model is one-dimensional (y = z = 0)",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Map a module error onto the config field it came from.
fn module_error(block: &str, e: hylab::Error) -> ConfigError {
    let join = |f: &str| if block.is_empty() { f.to_string() } else { format!("{block}.{f}") };
    match e {
        hylab::Error::InvalidParameter { field, reason } => validation(join(field), reason),
        other => validation(if block.is_empty() { "config".to_string() } else { block.to_string() }, other.to_string()),
    }
}

/// Set `a.b.c = value` inside a JSON object, creating objects on the way.
/// The value is read as JSON when it parses, else as a string.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let parse_err = |field: &str, message: &str| ConfigError::Parse {
        origin: "--override".into(),
        field: field.into(),
        message: message.into(),
    };
    let (key, raw) = assignment.split_once('=').ok_or_else(|| parse_err(assignment, "expected key=value"))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(parse_err(key, "empty key segment"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (k, part) in parts.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| parse_err(key, "path runs through a non-object value"))?;
        if k + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("key has at least one segment")
}

/// Parse, override, default and validate a config held in memory.
pub fn parse_scenario(text: &str, origin: &str, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        origin: origin.into(),
        field: String::new(),
        message: e.to_string(),
    })?;
    if !root.is_object() {
        return Err(ConfigError::Parse {
            origin: origin.into(),
            field: String::new(),
            message: "top level must be an object".into(),
        });
    }
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    let config: ScenarioConfig = serde_path_to_error::deserialize(root).map_err(|e| ConfigError::Parse {
        origin: origin.into(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let config = config.resolve();
    config.validate()?;
    Ok(config)
}

pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_scenario(&text, &path.display().to_string(), overrides)
}
