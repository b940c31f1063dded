//! `manifest.json`: what ran, with which inputs, what it measured, and which
//! invariant checks passed.

use std::path::Path;

use hylab::oracle::VerdictRow;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentKind, ScenarioConfig};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const UNIT_SYSTEM: &str = "hartree atomic units (hbar = m_e = a_B = e = 1)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    #[serde(with = "hylab::units::extended_float")]
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// `measured < limit`
    Below,
    /// `measured >= limit`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    #[serde(with = "hylab::units::extended_float")]
    pub measured: f64,
    pub bound: Bound,
    pub limit: f64,
    pub passed: bool,
}

impl InvariantCheck {
    pub fn new(name: &str, measured: f64, bound: Bound, limit: f64) -> Self {
        // NaN fails either way
        let passed = match bound {
            Bound::Below => measured < limit,
            Bound::AtLeast => measured >= limit,
        };
        Self { name: name.into(), measured, bound, limit, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub code_version: String,
    pub unit_system: String,
    pub kind: ExperimentKind,
    pub config: ScenarioConfig,
    pub derived: Vec<Quantity>,
    pub invariants: Vec<InvariantCheck>,
    /// Modelling choices that affect how the numbers are read.
    pub decisions: Vec<String>,
    /// Files written, relative to the run directory.
    pub artifacts: Vec<String>,
    /// Compare runs only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<VerdictRow>,
    /// False when the run aborted; the lists above then stop where it did.
    pub complete: bool,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn start(config: &ScenarioConfig) -> Self {
        Self {
            manifest_version: MANIFEST_VERSION,
            code_version: env!("CARGO_PKG_VERSION").into(),
            unit_system: UNIT_SYSTEM.into(),
            kind: config.kind,
            config: config.clone(),
            derived: Vec::new(),
            invariants: Vec::new(),
            decisions: Vec::new(),
            artifacts: Vec::new(),
            verdicts: Vec::new(),
            complete: false,
            error: None,
        }
    }

    pub fn derive(&mut self, name: &str, value: f64, unit: &str) {
        self.derived.push(Quantity { name: name.into(), value, unit: unit.into() });
    }

    pub fn check(&mut self, name: &str, measured: f64, bound: Bound, limit: f64) {
        self.invariants.push(InvariantCheck::new(name, measured, bound, limit));
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.derived.iter().find(|q| q.name == name).map(|q| q.value)
    }

    pub fn invariant(&self, name: &str) -> Option<&InvariantCheck> {
        self.invariants.iter().find(|c| c.name == name)
    }

    /// Complete and every invariant passed.
    pub fn succeeded(&self) -> bool {
        self.complete && self.invariants.iter().all(|c| c.passed)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")
    }

    pub fn read(dir: &Path) -> Result<Self, String> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_and_round_trip() {
        let mut m = RunManifest::start(&ScenarioConfig::with_kind(ExperimentKind::Hybrid).resolve());
        m.derive("ratio", f64::INFINITY, "1");
        m.check("small", 1e-12, Bound::Below, 1e-10);
        m.check("nan", f64::NAN, Bound::Below, 1.0);
        m.check("big", 2.0, Bound::AtLeast, 2.0);
        assert_eq!(m.invariants.iter().map(|c| c.passed).collect::<Vec<_>>(), vec![true, false, true]);
        assert!(!m.succeeded());
        m.complete = true;
        assert!(!m.succeeded());
        m.invariants.remove(1);
        assert!(m.succeeded());

        let dir = tempfile::tempdir().unwrap();
        m.write(dir.path()).unwrap();
        let back = RunManifest::read(dir.path()).unwrap();
        assert_eq!(back, m);
        assert!(std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap().contains("\"inf\""));
    }
}
