//! Center-of-mass Gaussian and the particle-center identities.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::{AtomParams, Vec3, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComMode {
    Frozen,
    FreeSpreading,
}

/// `ψ_c(R, 0) = Π_d (2πσ0²)^{-1/4} exp(-R_d² / (4σ0²) + i K_d R_d)`,
/// evolved freely with the total mass, or held at its initial width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComState {
    pub sigma0: f64,
    pub total_mass: f64,
    pub mode: ComMode,
    pub drift_momentum: Vec3,
}

impl ComState {
    pub fn new(sigma0: f64, params: &AtomParams, mode: ComMode) -> Result<Self> {
        if !sigma0.is_finite() || sigma0 <= 0.0 {
            return Err(invalid("sigma_com", format!("must be > 0, got {sigma0}")));
        }
        Ok(Self { sigma0, total_mass: params.total_mass(), mode, drift_momentum: Vec3::zeros() })
    }

    pub fn with_drift(mut self, momentum: Vec3) -> Self {
        self.drift_momentum = momentum;
        self
    }

    /// Complex width parameter `s_t = σ0 + i t / (2 M σ0)` (σ0 when frozen).
    fn s(&self, t: f64) -> C64 {
        match self.mode {
            ComMode::Frozen => C64::new(self.sigma0, 0.0),
            ComMode::FreeSpreading => C64::new(self.sigma0, t / (2.0 * self.total_mass * self.sigma0)),
        }
    }

    /// Position-density standard deviation `σ(t) = |s_t|`.
    pub fn width(&self, t: f64) -> f64 {
        self.s(t).norm()
    }

    pub fn center(&self, t: f64) -> Vec3 {
        match self.mode {
            ComMode::Frozen => Vec3::zeros(),
            ComMode::FreeSpreading => self.drift_momentum * (t / self.total_mass),
        }
    }

    /// One Cartesian factor of the amplitude; `k` is that component of
    /// the drift momentum.
    pub fn amplitude_1d(&self, x: f64, k: f64, t: f64) -> C64 {
        let s = self.s(t);
        let (shift, phase_t) = match self.mode {
            ComMode::Frozen => (0.0, 0.0),
            ComMode::FreeSpreading => (k * t / self.total_mass, t),
        };
        let u = x - shift;
        let arg = -u * u / (4.0 * self.sigma0 * s) + C64::i() * k * (x - 0.5 * k * phase_t / self.total_mass);
        (2.0 * std::f64::consts::PI).powf(-0.25) * s.powf(-0.5) * arg.exp()
    }

    /// Amplitude in the orbital plane (the z factor is dropped).
    pub fn amplitude_plane(&self, x: f64, y: f64, t: f64) -> C64 {
        self.amplitude_1d(x, self.drift_momentum.x, t) * self.amplitude_1d(y, self.drift_momentum.y, t)
    }
}

/// `⟨r_e⟩ = (m_p/M) ⟨r⟩`, `⟨r_p⟩ = -(m_e/M) ⟨r⟩` in the frame where the atom rests.
pub fn particle_centers(rel_center: &Vec3, params: &AtomParams) -> (Vec3, Vec3) {
    let m = params.total_mass();
    (rel_center * (params.proton_mass() / m), rel_center * (-params.electron_mass() / m))
}
