//! Merge run manifests into one markdown table.

use std::fmt::Write as _;
use std::path::PathBuf;

use hylab::units::format_extended;

use crate::config::ExperimentKind;
use crate::manifest::RunManifest;
use crate::run::verdict_markdown;

/// Headline quantities per kind, in column order.
fn headline(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::QuantumReference => &["t_rev_over_t_kepler", "t_spread_over_t_kepler", "kernel_ratio"],
        ExperimentKind::Hybrid => &["proton_displacement", "momentum_excursion", "relative_energy_drift"],
        ExperimentKind::Oracle => &["proton_swing_over_expected", "proton_purity_final", "relative_energy_drift"],
        ExperimentKind::Compare => &["discrepancy_ratio", "reference_momentum_drift", "candidate_momentum_drift"],
    }
}

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        format_extended(v)
    }
}

pub fn render(runs: &[(PathBuf, RunManifest)]) -> String {
    let mut out = String::from("| run | kind | status | invariants | quantities |\n|---|---|---|---|---|\n");
    for (dir, m) in runs {
        let passed = m.invariants.iter().filter(|c| c.passed).count();
        let status = match (&m.error, m.succeeded()) {
            (Some(_), _) => "incomplete",
            (None, true) => "ok",
            (None, false) => "failed",
        };
        let quantities: Vec<String> = headline(m.kind)
            .iter()
            .filter_map(|name| m.quantity(name).map(|v| format!("{name} = {}", number(v))))
            .collect();
        writeln!(
            out,
            "| {} | {} | {status} | {passed}/{} | {} |",
            dir.display(),
            m.kind.name(),
            m.invariants.len(),
            quantities.join("; ")
        )
        .unwrap();
    }
    for (dir, m) in runs {
        let failed: Vec<_> = m.invariants.iter().filter(|c| !c.passed).collect();
        if !failed.is_empty() || m.error.is_some() {
            writeln!(out, "\n### {}\n", dir.display()).unwrap();
            if let Some(e) = &m.error {
                writeln!(out, "aborted: {e}").unwrap();
            }
            for c in failed {
                writeln!(out, "- failed: {} = {} (limit {:?} {:e})", c.name, number(c.measured), c.bound, c.limit)
                    .unwrap();
            }
        }
    }
    for (dir, m) in runs.iter().filter(|(_, m)| !m.verdicts.is_empty()) {
        writeln!(out, "\n### comparison: {}\n", dir.display()).unwrap();
        out.push_str(&verdict_markdown(&m.verdicts));
    }
    out
}

/// Read every `<dir>/manifest.json`; the first unreadable one is an error.
pub fn collect(dirs: &[PathBuf]) -> Result<Vec<(PathBuf, RunManifest)>, String> {
    dirs.iter().map(|d| RunManifest::read(d).map(|m| (d.clone(), m))).collect()
}
