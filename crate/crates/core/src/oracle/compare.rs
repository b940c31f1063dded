//! Side-by-side comparison of an exact run with its hybrid counterpart.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hybrid::{
    level_period, step_in_place, AttachedBasis, Electron, ForceLaw, HybridState, TrajectoryRecord,
    GRID_STEPS_PER_PERIOD, KEPLER_STEPS,
};
use crate::spectral::Grid1d;
use crate::C64;

use super::{OracleRun, RelativeState};

/// Momentum drift below which a run counts as conserving momentum.
pub const MOMENTUM_TOLERANCE: f64 = 1e-6;
/// Detrended proton swing below which the proton counts as free.
pub const PROTON_MOTION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "law")]
pub enum RunKind {
    Oracle,
    Hybrid(ForceLaw),
}

/// The parts of a run the comparison reads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparableRun {
    pub label: String,
    pub kind: RunKind,
    pub softening: f64,
    pub mass_ratio: f64,
    pub initial_relative: Vec<C64>,
    pub t: Vec<f64>,
    pub proton_center: Vec<f64>,
    pub proton_momentum0: f64,
    pub total_momentum: Vec<f64>,
    pub electron_grid: Grid1d,
    pub electron_density: Vec<Vec<f64>>,
}

fn bound_coeffs(run: &OracleRun) -> Result<Vec<C64>> {
    match &run.scenario.relative {
        RelativeState::Bound { coeffs } => Ok(coeffs.clone()),
        RelativeState::Gaussian { .. } => {
            Err(Error::Mismatch("hybrid comparison needs a bound-state relative superposition".into()))
        }
    }
}

impl ComparableRun {
    pub fn from_oracle(run: &OracleRun) -> Result<Self> {
        let r = &run.record;
        Ok(Self {
            label: "full quantum".into(),
            kind: RunKind::Oracle,
            softening: run.scenario.softening,
            mass_ratio: run.scenario.mass_ratio,
            initial_relative: bound_coeffs(run)?,
            t: r.t.clone(),
            proton_center: r.x_p.clone(),
            proton_momentum0: r.p_p[0],
            total_momentum: r.total_momentum.clone(),
            electron_grid: run.final_field.spectral.gx,
            electron_density: r.electron_density.clone(),
        })
    }
}

/// Hybrid run matched to an oracle run: same potential and masses, the
/// electron in the same superposition of (electron-mass) soft-core levels,
/// the proton at `⟨x_p⟩(0)` with `p_p = ⟨p̂_p⟩(0)`, sampled at the oracle times.
///
/// The adiabatic law keeps the attached soft-core basis; the Ehrenfest law
/// propagates the same state on the oracle's `x_e` grid.
pub fn hybrid_counterpart(run: &OracleRun, law: ForceLaw) -> Result<(ComparableRun, TrajectoryRecord)> {
    let coeffs = bound_coeffs(run)?;
    let field = &run.final_field;
    let params = field.params;
    let gx = field.spectral.gx;
    let basis = Arc::new(AttachedBasis::relax(gx, field.potential, params.electron_mass(), coeffs.len().max(2))?);
    let mut c = coeffs.clone();
    c.resize(basis.count(), C64::new(0.0, 0.0));
    let r = &run.record;
    let start = HybridState::soft_core(basis.clone(), c, r.x_p[0], r.p_p[0])?;
    let mut state = match law {
        ForceLaw::AdiabaticGradient => start,
        ForceLaw::Ehrenfest => start.to_grid()?,
    };
    let per_period = match law {
        ForceLaw::AdiabaticGradient => KEPLER_STEPS,
        ForceLaw::Ehrenfest => GRID_STEPS_PER_PERIOD,
    };
    let dt_max = level_period(&basis.states)? / per_period as f64;
    let mut record = TrajectoryRecord::new(law, state.representation());
    let mut densities = Vec::with_capacity(r.len());
    state.t = r.t[0];
    record.push(&state, &params);
    densities.push(electron_density(&state));
    for w in r.t.windows(2) {
        let span = w[1] - w[0];
        let n = (span / dt_max).ceil().max(1.0) as usize;
        for _ in 0..n {
            step_in_place(&mut state, span / n as f64, law, &params)?;
        }
        state.t = w[1];
        record.push(&state, &params);
        densities.push(electron_density(&state));
    }
    let cmp = ComparableRun {
        label: format!("hybrid ({})", law_name(law)),
        kind: RunKind::Hybrid(law),
        softening: run.scenario.softening,
        mass_ratio: run.scenario.mass_ratio,
        initial_relative: coeffs,
        t: record.t.clone(),
        proton_center: record.r_p.iter().map(|v| v.x).collect(),
        proton_momentum0: record.p_p[0].x,
        total_momentum: record.total_momentum.iter().map(|v| v.x).collect(),
        electron_grid: gx,
        electron_density: densities,
    };
    Ok((cmp, record))
}

pub(crate) fn law_name(law: ForceLaw) -> &'static str {
    match law {
        ForceLaw::AdiabaticGradient => "adiabatic gradient",
        ForceLaw::Ehrenfest => "Ehrenfest",
    }
}

fn electron_density(state: &HybridState) -> Vec<f64> {
    match &state.electron {
        Electron::SoftCore { basis, coeffs } => {
            basis.expand(coeffs, state.r_p.x).iter().map(|v| v.norm_sqr()).collect()
        }
        Electron::Grid { psi, .. } => psi.iter().map(|v| v.norm_sqr()).collect(),
        Electron::Circular { .. } => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub aspect: String,
    pub full_quantum: String,
    pub hybrid: String,
    pub measured: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub reference: String,
    pub candidate: String,
    pub samples: usize,
    pub proton_discrepancy_max: f64,
    pub proton_discrepancy_rms: f64,
    /// Half peak-to-peak of the linearly detrended proton center.
    pub reference_proton_swing: f64,
    pub candidate_proton_swing: f64,
    /// `reference swing / candidate swing`; infinite when the candidate
    /// proton does not move at all.
    #[serde(with = "crate::units::extended_float")]
    pub discrepancy_ratio: f64,
    pub reference_momentum_drift: f64,
    pub candidate_momentum_drift: f64,
    /// Bhattacharyya overlap `Σ sqrt(ρ_a ρ_b) dx` of the electron densities.
    pub electron_overlap: Vec<f64>,
    pub verdicts: Vec<VerdictRow>,
}

impl ComparisonReport {
    pub fn min_overlap(&self) -> f64 {
        self.electron_overlap.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Swing of the residual after a least-squares straight-line fit.
fn detrended_swing(t: &[f64], x: &[f64]) -> f64 {
    let n = t.len() as f64;
    let (mt, mx) = (t.iter().sum::<f64>() / n, x.iter().sum::<f64>() / n);
    let stt: f64 = t.iter().map(|v| (v - mt).powi(2)).sum();
    let stx: f64 = t.iter().zip(x).map(|(a, b)| (a - mt) * (b - mx)).sum();
    let slope = if stt > 0.0 { stx / stt } else { 0.0 };
    let res: Vec<f64> = t.iter().zip(x).map(|(a, b)| b - mx - slope * (a - mt)).collect();
    let (lo, hi) = res.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    0.5 * (hi - lo)
}

fn drift(p: &[f64]) -> f64 {
    p.iter().map(|v| (v - p[0]).abs()).fold(0.0, f64::max)
}

fn conserved(d: f64) -> &'static str {
    if d < MOMENTUM_TOLERANCE {
        "conserved"
    } else {
        "not conserved"
    }
}

fn proton_behaviour(swing: f64) -> &'static str {
    if swing > PROTON_MOTION_FLOOR {
        "moves around the center of mass"
    } else {
        "behaves as a free particle"
    }
}

/// Compare a reference run (normally the oracle) with a candidate.
pub fn compare_with_hybrid(reference: &ComparableRun, candidate: &ComparableRun) -> Result<ComparisonReport> {
    let mismatch = |what: &str| Err(Error::Mismatch(what.to_string()));
    if !close(reference.softening, candidate.softening) {
        return mismatch("softening differs");
    }
    if !close(reference.mass_ratio, candidate.mass_ratio) {
        return mismatch("mass ratio differs");
    }
    if reference.initial_relative.len() != candidate.initial_relative.len()
        || reference.initial_relative.iter().zip(&candidate.initial_relative).any(|(a, b)| (a - b).norm() > 1e-12)
    {
        return mismatch("initial relative states differ");
    }
    if reference.t.len() != candidate.t.len() || reference.t.iter().zip(&candidate.t).any(|(a, b)| !close(*a, *b)) {
        return mismatch("sample times differ");
    }
    if reference.t.is_empty() {
        return mismatch("no samples");
    }
    if (reference.proton_center[0] - candidate.proton_center[0]).abs() > 1e-8 {
        return mismatch("initial proton centers differ");
    }
    if (reference.proton_momentum0 - candidate.proton_momentum0).abs() > 1e-8 {
        return mismatch("initial proton momenta differ");
    }
    if reference.electron_grid != candidate.electron_grid {
        return mismatch("electron grids differ");
    }
    let gaps: Vec<f64> =
        reference.proton_center.iter().zip(&candidate.proton_center).map(|(a, b)| (a - b).abs()).collect();
    let n = gaps.len() as f64;
    let dmax = gaps.iter().copied().fold(0.0, f64::max);
    let drms = (gaps.iter().map(|g| g * g).sum::<f64>() / n).sqrt();
    let sr = detrended_swing(&reference.t, &reference.proton_center);
    let sc = detrended_swing(&candidate.t, &candidate.proton_center);
    let ratio = if sc > 0.0 {
        sr / sc
    } else if sr > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let dx = reference.electron_grid.dx;
    let overlap: Vec<f64> = reference
        .electron_density
        .iter()
        .zip(&candidate.electron_density)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y).max(0.0).sqrt()).sum::<f64>() * dx)
        .collect();
    let (pr, pc) = (drift(&reference.total_momentum), drift(&candidate.total_momentum));
    let min_overlap = overlap.iter().copied().fold(f64::INFINITY, f64::min);
    let electron = if min_overlap > 0.9 { "nearly the same" } else { "different" };
    let verdicts = vec![
        VerdictRow {
            aspect: "electron dynamics".into(),
            full_quantum: "bound relative oscillation".into(),
            hybrid: electron.into(),
            measured: format!("min density overlap {min_overlap:.6}"),
        },
        VerdictRow {
            aspect: "proton dynamics".into(),
            full_quantum: proton_behaviour(sr).into(),
            hybrid: proton_behaviour(sc).into(),
            measured: format!(
                "swing {sr:.6e} vs {sc:.6e}, max gap {dmax:.6e}, ratio {}",
                crate::units::format_extended(ratio)
            ),
        },
        VerdictRow {
            aspect: "conservation of total momentum".into(),
            full_quantum: conserved(pr).into(),
            hybrid: conserved(pc).into(),
            measured: format!("drift {pr:.3e} vs {pc:.3e}"),
        },
    ];
    Ok(ComparisonReport {
        reference: reference.label.clone(),
        candidate: candidate.label.clone(),
        samples: reference.t.len(),
        proton_discrepancy_max: dmax,
        proton_discrepancy_rms: drms,
        reference_proton_swing: sr,
        candidate_proton_swing: sc,
        discrepancy_ratio: ratio,
        reference_momentum_drift: pr,
        candidate_momentum_drift: pc,
        electron_overlap: overlap,
        verdicts,
    })
}
