//! Mean-field hybrid dynamics: a quantum electron coupled to a classical
//! proton through one scalar Hamiltonian functional.
//!
//! The electron is carried either by coefficients over a basis rigidly
//! attached to the proton position, or by amplitudes on a fixed 1-d grid.

mod force;
mod run;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{ln_circular_amplitude, Coulomb, SphericalPoint};
use crate::error::{invalid, Error, Result};
use crate::reference::CircularPacket;
use crate::softcore::{relax_bound_states, BoundStates, RelaxOptions, SoftCore};
use crate::spectral::{Grid1d, Spectral1d};
use crate::{AtomParams, PacketSpec, Vec3, C64};

pub use force::{cloud_extent, displaced_field, force, force_adiabatic, force_ehrenfest, ADIABATIC_FORCE_LIMIT};
pub use run::{
    run_hybrid, step, step_in_place, HybridScenario, TrajectoryRecord, GRID_STEPS_PER_PERIOD, KEPLER_STEPS,
    STEP_GUARD_DIVISOR,
};

/// How the nucleus feels the electron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceLaw {
    /// `-∇_{r_p} Σ |a_n|² E_n` in the proton-attached eigenbasis.
    AdiabaticGradient,
    /// `+⟨φ| ∇_{r_e} V |φ⟩`.
    Ehrenfest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Circular,
    SoftCoreBasis,
    Grid,
}

/// Soft-core eigenstates with the matrices needed for observables.
#[derive(Debug, Clone)]
pub struct AttachedBasis {
    pub states: BoundStates,
    pub potential: SoftCore,
    /// `⟨χ_i| x |χ_j⟩`, relative to the well center.
    pub position: DMatrix<C64>,
    /// `⟨χ_i| -i d/dx |χ_j⟩`.
    pub momentum: DMatrix<C64>,
    /// `⟨χ_i| V'(x) |χ_j⟩`.
    pub field: DMatrix<C64>,
}

impl AttachedBasis {
    pub fn new(states: BoundStates, potential: SoftCore) -> Self {
        let spec = Spectral1d::new(states.grid);
        let g = states.grid;
        let dx = g.dx;
        // basis states are centered on the grid origin
        let xs = g.xs();
        let derivs: Vec<Vec<C64>> = states.states.iter().map(|s| spec.derivative(s)).collect();
        let k = states.count();
        let mut position = DMatrix::zeros(k, k);
        let mut momentum = DMatrix::zeros(k, k);
        let mut field = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (&states.states[i], &states.states[j]);
                let mut px = C64::new(0.0, 0.0);
                let mut pv = C64::new(0.0, 0.0);
                let mut pp = C64::new(0.0, 0.0);
                for n in 0..g.n {
                    let ab = a[n].conj() * b[n];
                    px += ab * xs[n];
                    pv += ab * potential.derivative(xs[n]);
                    pp += a[n].conj() * derivs[j][n] * C64::new(0.0, -1.0);
                }
                position[(i, j)] = px * dx;
                field[(i, j)] = pv * dx;
                momentum[(i, j)] = pp * dx;
            }
        }
        Self { states, potential, position, momentum, field }
    }

    /// Relax `count` levels of `potential` centered on the grid origin.
    pub fn relax(grid: Grid1d, potential: SoftCore, mass: f64, count: usize) -> Result<Self> {
        let v = potential.sample(&grid, 0.0);
        let states = relax_bound_states(grid, &v, mass, count, &RelaxOptions::default())?;
        Ok(Self::new(states, potential))
    }

    pub fn count(&self) -> usize {
        self.states.count()
    }

    /// `ψ(x) = Σ a_j χ_j(x - center)` on the basis grid.
    pub fn expand(&self, coeffs: &[C64], center: f64) -> Vec<C64> {
        let spec = Spectral1d::new(self.states.grid);
        let mut psi = vec![C64::new(0.0, 0.0); self.states.grid.n];
        for (a, s) in coeffs.iter().zip(&self.states.states) {
            psi.iter_mut().zip(s).for_each(|(p, v)| *p += a * v);
        }
        if center == 0.0 {
            psi
        } else {
            spec.translate(&psi, center)
        }
    }
}

fn quadratic(m: &DMatrix<C64>, c: &[C64]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..c.len() {
        for j in 0..c.len() {
            s += c[i].conj() * m[(i, j)] * c[j];
        }
    }
    s
}

/// Grid electron in a soft-core well centered on the proton.
#[derive(Debug, Clone)]
pub struct GridElectron {
    pub spectral: Spectral1d,
    pub potential: SoftCore,
    /// Populations are projections onto these, translated to `x_p`.
    pub basis: Option<Arc<AttachedBasis>>,
}

#[derive(Debug, Clone)]
pub enum Electron {
    /// Coefficients over circular states `u_n(r_e - r_p)`.
    Circular { packet: Arc<CircularPacket>, coeffs: Vec<C64> },
    /// Coefficients over soft-core eigenstates `χ_j(x_e - x_p)`.
    SoftCore { basis: Arc<AttachedBasis>, coeffs: Vec<C64> },
    /// Amplitudes `ψ(x_e)` on a fixed grid.
    Grid { setup: Arc<GridElectron>, psi: Vec<C64> },
}

/// Electron plus classical proton. One-dimensional representations use
/// only the x components of the vectors.
#[derive(Debug, Clone)]
pub struct HybridState {
    pub electron: Electron,
    pub r_p: Vec3,
    pub p_p: Vec3,
    pub t: f64,
    /// Characteristic electron period; the step guard is a fraction of it.
    pub period: f64,
}

/// Circular packet with the electron mass, centered on the proton at `r_p0`.
pub fn init_hybrid(spec: &PacketSpec, r_p0: Vec3, p_p0: Vec3, params: &AtomParams) -> Result<HybridState> {
    let packet = CircularPacket::gaussian(spec, params, Coulomb::clamped_electron(params))?;
    Ok(HybridState::circular(packet, r_p0, p_p0))
}

impl HybridState {
    /// Any circular packet; its `coulomb.mass` sets the electron mass tag.
    pub fn circular(packet: CircularPacket, r_p0: Vec3, p_p0: Vec3) -> Self {
        let period = packet.coulomb.kepler_period(packet.spec.n_bar);
        let coeffs = packet.coeffs().to_vec();
        Self { electron: Electron::Circular { packet: Arc::new(packet), coeffs }, r_p: r_p0, p_p: p_p0, t: 0.0, period }
    }

    /// Soft-core basis state; the period is that of the two lowest levels.
    pub fn soft_core(basis: Arc<AttachedBasis>, coeffs: Vec<C64>, x_p0: f64, p_p0: f64) -> Result<Self> {
        if coeffs.len() != basis.count() {
            return Err(invalid("coeffs", format!("{} coefficients for {} basis states", coeffs.len(), basis.count())));
        }
        let coeffs = normalized(coeffs)?;
        let period = level_period(&basis.states)?;
        Ok(Self {
            electron: Electron::SoftCore { basis, coeffs },
            r_p: Vec3::new(x_p0, 0.0, 0.0),
            p_p: Vec3::new(p_p0, 0.0, 0.0),
            t: 0.0,
            period,
        })
    }

    /// Grid amplitudes in the lab frame; `period` is supplied by the caller.
    pub fn grid(setup: Arc<GridElectron>, psi: Vec<C64>, x_p0: f64, p_p0: f64, period: f64) -> Result<Self> {
        if psi.len() != setup.spectral.grid.n {
            return Err(Error::Grid(format!("{} amplitudes for {} grid points", psi.len(), setup.spectral.grid.n)));
        }
        if !(period > 0.0) {
            return Err(invalid("period", "must be > 0"));
        }
        let n = setup.spectral.norm_sq(&psi).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Representation("grid amplitudes must be finite and not all zero".into()));
        }
        let psi = psi.into_iter().map(|v| v / n).collect();
        Ok(Self {
            electron: Electron::Grid { setup, psi },
            r_p: Vec3::new(x_p0, 0.0, 0.0),
            p_p: Vec3::new(p_p0, 0.0, 0.0),
            t: 0.0,
            period,
        })
    }

    /// The same physical state in the grid representation, expanding
    /// the attached soft-core coefficients at the current `x_p`.
    pub fn to_grid(&self) -> Result<Self> {
        let Electron::SoftCore { basis, coeffs } = &self.electron else {
            return Err(Error::Representation("only soft-core basis states convert to a grid".into()));
        };
        let setup = Arc::new(GridElectron {
            spectral: Spectral1d::new(basis.states.grid),
            potential: basis.potential,
            basis: Some(basis.clone()),
        });
        let psi = basis.expand(coeffs, self.r_p.x);
        let mut out = Self::grid(setup, psi, self.r_p.x, self.p_p.x, self.period)?;
        out.t = self.t;
        Ok(out)
    }

    pub fn representation(&self) -> Representation {
        match self.electron {
            Electron::Circular { .. } => Representation::Circular,
            Electron::SoftCore { .. } => Representation::SoftCoreBasis,
            Electron::Grid { .. } => Representation::Grid,
        }
    }

    pub fn electron_mass(&self, params: &AtomParams) -> f64 {
        match &self.electron {
            Electron::Circular { packet, .. } => packet.coulomb.mass,
            Electron::SoftCore { basis, .. } => basis.states.mass,
            Electron::Grid { .. } => params.electron_mass(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match &self.electron {
            Electron::Circular { coeffs, .. } | Electron::SoftCore { coeffs, .. } => {
                coeffs.iter().map(|c| c.norm_sqr()).sum()
            }
            Electron::Grid { setup, psi } => setup.spectral.norm_sq(psi),
        }
    }

    /// Adiabatic populations `|a_n|²`; for grids, overlaps with the attached
    /// soft-core states when a basis is available (empty otherwise).
    pub fn populations(&self) -> Vec<f64> {
        match &self.electron {
            Electron::Circular { coeffs, .. } | Electron::SoftCore { coeffs, .. } => {
                coeffs.iter().map(|c| c.norm_sqr()).collect()
            }
            Electron::Grid { setup, psi } => match &setup.basis {
                None => Vec::new(),
                Some(b) => {
                    let spec = &setup.spectral;
                    let dx = spec.grid.dx;
                    b.states
                        .states
                        .iter()
                        .map(|s| {
                            let moved = spec.translate(s, self.r_p.x);
                            (moved.iter().zip(psi).map(|(a, p)| a.conj() * p).sum::<C64>() * dx).norm_sqr()
                        })
                        .collect()
                }
            },
        }
    }

    /// `⟨r_e⟩` in the lab frame.
    pub fn electron_center(&self) -> Vec3 {
        match &self.electron {
            Electron::Circular { packet, coeffs } => self.r_p + packet.center_of(coeffs),
            Electron::SoftCore { basis, coeffs } => {
                Vec3::new(self.r_p.x + quadratic(&basis.position, coeffs).re, 0.0, 0.0)
            }
            Electron::Grid { setup, psi } => {
                let g = &setup.spectral.grid;
                let x: f64 = psi.iter().enumerate().map(|(i, v)| v.norm_sqr() * g.x(i)).sum::<f64>() * g.dx;
                Vec3::new(x, 0.0, 0.0)
            }
        }
    }

    /// `⟨p̂_e⟩`: analytic phase differentiation for coefficient
    /// representations, spectral differentiation on grids.
    pub fn electron_momentum(&self) -> Vec3 {
        match &self.electron {
            Electron::Circular { packet, coeffs } => packet.momentum_of(coeffs),
            Electron::SoftCore { basis, coeffs } => Vec3::new(quadratic(&basis.momentum, coeffs).re, 0.0, 0.0),
            Electron::Grid { setup, psi } => Vec3::new(setup.spectral.mean_momentum(psi), 0.0, 0.0),
        }
    }

    /// Electron amplitude at a lab-frame point (circular representation).
    pub fn electron_amplitude(&self, point: &Vec3) -> Result<C64> {
        let Electron::Circular { packet, coeffs } = &self.electron else {
            return Err(Error::Representation("point amplitudes need the circular representation".into()));
        };
        let sp = SphericalPoint::from_cartesian(&(point - self.r_p));
        Ok(packet
            .levels()
            .zip(coeffs)
            .map(|(n, c)| {
                let (ln_mag, phase) = ln_circular_amplitude(n, &sp, &packet.coulomb);
                c * C64::from_polar(ln_mag.exp(), phase)
            })
            .sum())
    }
}

fn normalized(mut c: Vec<C64>) -> Result<Vec<C64>> {
    let n = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Representation("coefficients must be finite and not all zero".into()));
    }
    c.iter_mut().for_each(|v| *v /= n);
    Ok(c)
}

/// `2π / (ε_1 - ε_0)`.
pub fn level_period(states: &BoundStates) -> Result<f64> {
    if states.count() < 2 {
        return Err(invalid("count", "a period needs at least two levels"));
    }
    Ok(2.0 * std::f64::consts::PI / (states.energies[1] - states.energies[0]))
}

/// `⟨φ| T + V |φ⟩ + p_p² / (2 m_p)`; the electron part is `Σ |a_n|² E_n`
/// in the attached representations.
pub fn hybrid_energy(state: &HybridState, params: &AtomParams) -> f64 {
    let kinetic_p = state.p_p.norm_squared() / (2.0 * params.proton_mass());
    let electronic = match &state.electron {
        Electron::Circular { packet, coeffs } => {
            packet.levels().zip(coeffs).map(|(n, c)| c.norm_sqr() * packet.coulomb.energy(n)).sum()
        }
        Electron::SoftCore { basis, coeffs } => {
            coeffs.iter().zip(&basis.states.energies).map(|(c, e)| c.norm_sqr() * e).sum()
        }
        Electron::Grid { setup, psi } => {
            let spec = &setup.spectral;
            let g = &spec.grid;
            let v: f64 = psi
                .iter()
                .enumerate()
                .map(|(i, p)| p.norm_sqr() * setup.potential.value(g.x(i) - state.r_p.x))
                .sum::<f64>()
                * g.dx;
            spec.kinetic_energy(psi, params.electron_mass()) * spec.norm_sq(psi) + v
        }
    };
    electronic + kinetic_p
}

/// `P = p_p + ⟨p̂_e⟩`.
pub fn total_momentum(state: &HybridState, _params: &AtomParams) -> Vec3 {
    state.p_p + state.electron_momentum()
}
