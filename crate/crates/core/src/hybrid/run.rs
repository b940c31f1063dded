//! Symplectic splitting and trajectory sampling.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::{AtomParams, Vec3, C64};

use super::{
    force_adiabatic, force_ehrenfest, hybrid_energy, total_momentum, Electron, ForceLaw, HybridState, Representation,
};

/// `dt` may not exceed `period / STEP_GUARD_DIVISOR`.
pub const STEP_GUARD_DIVISOR: f64 = 1000.0;
/// Default steps per Kepler period in attached-basis runs.
pub const KEPLER_STEPS: usize = 4096;
/// Default steps per oscillation period in grid runs.
pub const GRID_STEPS_PER_PERIOD: usize = 8192;

/// One step `B(dt/2) A(dt) B(dt/2)`.
///
/// `B` kicks the proton with the force law (and, on grids, applies the
/// potential phase, which leaves the density and so the force unchanged).
/// `A` drifts the proton and propagates the free electron: level phases in
/// an attached basis, kinetic phases on a grid.
pub fn step_in_place(state: &mut HybridState, dt: f64, law: ForceLaw, params: &AtomParams) -> Result<()> {
    let limit = state.period / STEP_GUARD_DIVISOR;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepGuard { dt, limit });
    }
    match (law, state.representation()) {
        (ForceLaw::Ehrenfest, Representation::Grid)
        | (ForceLaw::AdiabaticGradient, Representation::Circular)
        | (ForceLaw::AdiabaticGradient, Representation::SoftCoreBasis) => {}
        (ForceLaw::Ehrenfest, r) => {
            return Err(Error::Representation(format!(
                "Ehrenfest propagation needs the grid representation, got {r:?}"
            )))
        }
        (ForceLaw::AdiabaticGradient, _) => {
            return Err(Error::Representation("the adiabatic law cannot propagate a grid electron".into()))
        }
    }
    let m_p = params.proton_mass();
    half_kick(state, 0.5 * dt, law, params)?;
    state.r_p += state.p_p * (dt / m_p);
    match &mut state.electron {
        Electron::Circular { packet, coeffs } => {
            for (c, n) in coeffs.iter_mut().zip(packet.levels()) {
                *c *= C64::from_polar(1.0, -packet.coulomb.energy(n) * dt);
            }
        }
        Electron::SoftCore { basis, coeffs } => {
            for (c, e) in coeffs.iter_mut().zip(&basis.states.energies) {
                *c *= C64::from_polar(1.0, -e * dt);
            }
        }
        Electron::Grid { setup, psi } => {
            let m_e = params.electron_mass();
            let phases: Vec<C64> =
                setup.spectral.ks().iter().map(|&k| C64::from_polar(1.0, -k * k / (2.0 * m_e) * dt)).collect();
            setup.spectral.apply_diagonal_k(psi, &phases);
        }
    }
    half_kick(state, 0.5 * dt, law, params)?;
    state.t += dt;
    Ok(())
}

fn half_kick(state: &mut HybridState, tau: f64, law: ForceLaw, params: &AtomParams) -> Result<()> {
    let f = match law {
        ForceLaw::AdiabaticGradient => force_adiabatic(state, params)?,
        ForceLaw::Ehrenfest => force_ehrenfest(state, params)?,
    };
    state.p_p += f * tau;
    if let Electron::Grid { setup, psi } = &mut state.electron {
        let g = &setup.spectral.grid;
        for (i, p) in psi.iter_mut().enumerate() {
            *p *= C64::from_polar(1.0, -setup.potential.value(g.x(i) - state.r_p.x) * tau);
        }
    }
    Ok(())
}

/// Functional form of [`step_in_place`].
pub fn step(state: &HybridState, dt: f64, law: ForceLaw, params: &AtomParams) -> Result<HybridState> {
    let mut next = state.clone();
    step_in_place(&mut next, dt, law, params)?;
    Ok(next)
}

#[derive(Debug, Clone)]
pub struct HybridScenario {
    pub initial: HybridState,
    pub params: AtomParams,
    pub dt: f64,
    pub steps: usize,
    /// Record every `stride` steps (the last step is always recorded).
    pub stride: usize,
}

impl HybridScenario {
    /// Fixed `dt = period / steps_per_period` over `periods` periods.
    pub fn periods(initial: HybridState, params: AtomParams, periods: f64, steps_per_period: usize) -> Result<Self> {
        if !(periods > 0.0) || steps_per_period == 0 {
            return Err(invalid("periods", "need a positive horizon and step count"));
        }
        let dt = initial.period / steps_per_period as f64;
        let steps = (periods * steps_per_period as f64).round() as usize;
        Ok(Self { initial, params, dt, steps, stride: 1 })
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be >= 1"));
        }
        let norm = self.initial.norm_sq();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid("electron", format!("norm {norm} differs from 1")));
        }
        Ok(())
    }
}

/// Sampled hybrid trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub law: ForceLaw,
    pub representation: Representation,
    pub t: Vec<f64>,
    pub r_p: Vec<Vec3>,
    pub p_p: Vec<Vec3>,
    pub electron_center: Vec<Vec3>,
    pub electron_momentum: Vec<Vec3>,
    pub total_momentum: Vec<Vec3>,
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn new(law: ForceLaw, representation: Representation) -> Self {
        Self {
            law,
            representation,
            t: Vec::new(),
            r_p: Vec::new(),
            p_p: Vec::new(),
            electron_center: Vec::new(),
            electron_momentum: Vec::new(),
            total_momentum: Vec::new(),
            energy: Vec::new(),
            norm: Vec::new(),
            populations: Vec::new(),
        }
    }

    pub fn push(&mut self, state: &HybridState, params: &AtomParams) {
        self.t.push(state.t);
        self.r_p.push(state.r_p);
        self.p_p.push(state.p_p);
        self.electron_center.push(state.electron_center());
        self.electron_momentum.push(state.electron_momentum());
        self.total_momentum.push(total_momentum(state, params));
        self.energy.push(hybrid_energy(state, params));
        self.norm.push(state.norm_sq());
        self.populations.push(state.populations());
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `max_t |P(t) - P(0)|`.
    pub fn momentum_excursion(&self) -> f64 {
        max_deviation(&self.total_momentum)
    }

    /// `max_t |r_p(t) - r_p(0)|`.
    pub fn proton_displacement(&self) -> f64 {
        max_deviation(&self.r_p)
    }

    /// `max_t |H(t) - H(0)| / |H(0)|`.
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs()
    }

    pub fn norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - self.norm[0]).abs()).fold(0.0, f64::max)
    }

    /// Largest change of any population from its initial value.
    pub fn population_drift(&self) -> f64 {
        let first = &self.populations[0];
        self.populations.iter().flat_map(|p| p.iter().zip(first).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
    }
}

fn max_deviation(series: &[Vec3]) -> f64 {
    series.iter().map(|v| (v - series[0]).norm()).fold(0.0, f64::max)
}

/// Fixed-step propagation, recording the state every `stride` steps.
pub fn run_hybrid(scenario: &HybridScenario, law: ForceLaw) -> Result<TrajectoryRecord> {
    scenario.validate()?;
    let params = &scenario.params;
    let mut state = scenario.initial.clone();
    let t0 = state.t;
    let mut record = TrajectoryRecord::new(law, state.representation());
    record.push(&state, params);
    for k in 1..=scenario.steps {
        step_in_place(&mut state, scenario.dt, law, params)?;
        // avoid accumulating rounding in the clock
        state.t = t0 + k as f64 * scenario.dt;
        if k % scenario.stride == 0 || k == scenario.steps {
            record.push(&state, params);
        }
    }
    Ok(record)
}
