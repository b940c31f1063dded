//! The two readings of the force on the nucleus.

use crate::basis::{ln_circular_amplitude, SphericalPoint};
use crate::error::{Error, Result};
use crate::quadrature::{composite_legendre, legendre_on};
use crate::reference::CircularPacket;
use crate::{AtomParams, Vec3, C64};

use super::{hybrid_energy, quadratic, Electron, ForceLaw, HybridState};

/// Largest adiabatic force magnitude accepted as zero (hartree / a_B).
pub const ADIABATIC_FORCE_LIMIT: f64 = 1e-10;

/// Rigid-shift step for the adiabatic finite differences.
const SHIFT: f64 = 1e-3;

/// `-∇_{r_p} H` with the electron basis carried rigidly by the proton.
///
/// Computed by symmetric differences of [`hybrid_energy`]. The grid
/// representation has no attached basis and is rejected.
pub fn force_adiabatic(state: &HybridState, params: &AtomParams) -> Result<Vec3> {
    let dims = match &state.electron {
        Electron::Circular { .. } => 3,
        Electron::SoftCore { .. } => 1,
        Electron::Grid { .. } => {
            return Err(Error::Representation(
                "the adiabatic force needs a basis attached to the proton; grid electrons carry none".into(),
            ))
        }
    };
    let mut f = Vec3::zeros();
    let mut shifted = state.clone();
    for d in 0..dims {
        shifted.r_p = state.r_p;
        shifted.r_p[d] += SHIFT;
        let plus = hybrid_energy(&shifted, params);
        shifted.r_p[d] = state.r_p[d] - SHIFT;
        let minus = hybrid_energy(&shifted, params);
        f[d] = -(plus - minus) / (2.0 * SHIFT);
    }
    if f.norm() >= ADIABATIC_FORCE_LIMIT {
        return Err(Error::Representation(format!("adiabatic force {:.3e} is not zero", f.norm())));
    }
    Ok(f)
}

/// `+⟨φ| ∇_{r_e} V(r_e - r_p) |φ⟩`.
///
/// Circular packets use the closed-form `⟨u_n| r/r³ |u_{n+1}⟩` elements,
/// soft-core bases the precomputed `⟨χ_i|V'|χ_j⟩`, grids the sum of the
/// density times the analytic derivative.
pub fn force_ehrenfest(state: &HybridState, _params: &AtomParams) -> Result<Vec3> {
    match &state.electron {
        Electron::Circular { packet, coeffs } => packet.field_of(coeffs),
        Electron::SoftCore { basis, coeffs } => Ok(Vec3::new(quadratic(&basis.field, coeffs).re, 0.0, 0.0)),
        Electron::Grid { setup, psi } => {
            let g = &setup.spectral.grid;
            let f: f64 = psi
                .iter()
                .enumerate()
                .map(|(i, p)| p.norm_sqr() * setup.potential.derivative(g.x(i) - state.r_p.x))
                .sum::<f64>()
                * g.dx;
            Ok(Vec3::new(f, 0.0, 0.0))
        }
    }
}

pub fn force(state: &HybridState, law: ForceLaw, params: &AtomParams) -> Result<Vec3> {
    match law {
        ForceLaw::AdiabaticGradient => force_adiabatic(state, params),
        ForceLaw::Ehrenfest => force_ehrenfest(state, params),
    }
}

/// Radius beyond which every level of the packet carries a negligible
/// fraction (< 1e-14) of its radial density.
///
/// `r² R_{n,n-1}²` is a Gamma density with shape `2n + 1` and scale `n a / 2`.
pub fn cloud_extent(packet: &CircularPacket) -> f64 {
    let n = f64::from(packet.n_hi());
    let shape = 2.0 * n + 1.0;
    0.5 * n * packet.coulomb.length_scale() * (shape + 10.0 * shape.sqrt() + 30.0)
}

/// Coulomb field `⟨(r - δ)/|r - δ|³⟩` of the packet density (centered at
/// the origin) felt by a point charge at `offset = δ`.
///
/// `δ = 0` uses the closed-form elements. Otherwise the density is
/// integrated by quadrature, which is only accepted when the point lies
/// outside the cloud; inside it the integrand is singular.
pub fn displaced_field(packet: &CircularPacket, coeffs: &[C64], offset: Vec3) -> Result<Vec3> {
    let d = offset.norm();
    if d == 0.0 {
        return packet.field_of(coeffs);
    }
    let extent = cloud_extent(packet);
    if d <= extent {
        return Err(Error::SingularQuadrature(format!(
            "point at distance {d} lies inside the electron cloud (extent {extent:.3})"
        )));
    }
    let n_hi = packet.n_hi() as usize;
    let window = coeffs.len();
    let radial = composite_legendre(24, 4 * n_hi.max(4), 0.0, extent);
    let polar = legendre_on((2 * n_hi + 24).max(32), -1.0, 1.0);
    let n_phi = 64 + 8 * window;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut field = Vec3::zeros();
    for &(r, wr) in &radial {
        for &(u, wu) in &polar {
            let theta = u.acos();
            let s = (1.0 - u * u).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = k as f64 * dphi;
                let sp = SphericalPoint::new(r, theta, phi);
                let amp: C64 = packet
                    .levels()
                    .zip(coeffs)
                    .map(|(n, c)| {
                        let (ln_mag, ph) = ln_circular_amplitude(n, &sp, &packet.coulomb);
                        c * C64::from_polar(ln_mag.exp(), ph)
                    })
                    .sum();
                let x = Vec3::new(r * s * phi.cos(), r * s * phi.sin(), r * u) - offset;
                let q = x.norm();
                field += x * (amp.norm_sqr() * r * r * wr * wu * dphi / (q * q * q));
            }
        }
    }
    Ok(field)
}
