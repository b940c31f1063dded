//! Hydrogen bound states.
//!
//! Every routine works for an arbitrary orbiting mass: the full quantum
//! reference uses the reduced mass, the hybrid electron orbits a clamped
//! classical proton with the bare electron mass. Lengths scale with the
//! effective Bohr radius `1 / mass`.
//!
//! Circular states (l = m = n − 1) have a constant Laguerre factor, so they
//! and their adjacent-state matrix elements are evaluated in closed form,
//! entirely in log space. The general `u_nlm` is available for checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::{AtomParams, Vec3, C64};

/// Largest principal quantum number the closed forms are validated for.
pub const MAX_N: u32 = 200;

/// The Coulomb problem for a particle of the given mass bound to a fixed center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coulomb {
    pub mass: f64,
}

impl Coulomb {
    pub fn new(mass: f64) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(invalid("mass", format!("must be finite and > 0, got {mass}")));
        }
        Ok(Self { mass })
    }

    /// Relative motion: reduced mass.
    pub fn relative(params: &AtomParams) -> Self {
        Self { mass: params.reduced_mass() }
    }

    /// Electron around a clamped (classical) proton: bare electron mass.
    pub fn clamped_electron(params: &AtomParams) -> Self {
        Self { mass: params.electron_mass() }
    }

    /// Effective Bohr radius.
    pub fn length_scale(&self) -> f64 {
        1.0 / self.mass
    }

    /// `-mass / (2 n²)`. The spectrum carries no dependence on l, m, or on
    /// where the force center sits.
    pub fn energy(&self, n: u32) -> f64 {
        let n = f64::from(n);
        -self.mass / (2.0 * n * n)
    }

    /// Radius of the classical circular orbit `n² a`.
    pub fn orbit_radius(&self, n: f64) -> f64 {
        n * n * self.length_scale()
    }

    /// Classical Kepler period at (possibly fractional) `n`: `2π n³ / mass`.
    pub fn kepler_period(&self, n: f64) -> f64 {
        2.0 * PI * n.powi(3) / self.mass
    }
}

/// Bound-state energy of level `n`.
pub fn bohr_energy(n: u32, coulomb: &Coulomb) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n", "principal quantum number must be >= 1"));
    }
    Ok(coulomb.energy(n))
}

/// Index of the circular state `u_{n, n-1, n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CircularStateIndex(u32);

impl CircularStateIndex {
    pub fn new(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n", "principal quantum number must be >= 1"));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    pub fn l(self) -> u32 {
        self.0 - 1
    }

    pub fn m(self) -> i64 {
        i64::from(self.0) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }

    pub fn from_cartesian(p: &Vec3) -> Self {
        let r = p.norm();
        let theta = if r > 0.0 { (p.z / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
        Self { r, theta, phi: p.y.atan2(p.x) }
    }
}

/// Matrix element `⟨u_n | x | u_{n+1}⟩` between adjacent circular states.
///
/// With all coefficients real at φ = 0 it is real and positive; the
/// companion element of `y` is `i·value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleElement {
    pub n: u32,
    pub value: f64,
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| f64::from(i).ln()).sum()
}

/// ln of the radial normalization `N_n² = (2/(n a))^{2n+1} / (2n)!`, halved.
fn ln_radial_norm(n: u32, a: f64) -> f64 {
    let nf = f64::from(n);
    0.5 * ((2.0 * nf + 1.0) * (2.0 / (nf * a)).ln() - ln_factorial(2 * n))
}

/// ln of `c_l` in `Y_l^l = c_l sin^l θ e^{ilφ}` (no Condon–Shortley sign).
fn ln_sph_top(l: u32) -> f64 {
    let lf = f64::from(l);
    0.5 * (ln_factorial(2 * l + 1) - (4.0 * PI).ln() - lf * 4f64.ln() - 2.0 * ln_factorial(l))
}

/// `ln (N_n c_{n-1})`: the full constant in front of `r^{n-1} e^{-r/(na)} sin^{n-1}θ`.
pub fn ln_circular_prefactor(n: u32, coulomb: &Coulomb) -> f64 {
    ln_radial_norm(n, coulomb.length_scale()) + ln_sph_top(n - 1)
}

/// `ln R_{n,n-1}(r)`; `-inf` at the origin for n > 1.
pub fn ln_circular_radial(n: u32, r: f64, coulomb: &Coulomb) -> f64 {
    let a = coulomb.length_scale();
    let nf = f64::from(n);
    let power = if n == 1 { 0.0 } else { (nf - 1.0) * r.ln() };
    ln_radial_norm(n, a) + power - r / (nf * a)
}

fn ln_circular_angular(n: u32, theta: f64) -> f64 {
    let l = n - 1;
    let power = if l == 0 { 0.0 } else { f64::from(l) * theta.sin().abs().ln() };
    ln_sph_top(l) + power
}

/// `ln |u_{n,n-1,n-1}|` at the point, together with the azimuthal phase.
pub fn ln_circular_amplitude(n: u32, point: &SphericalPoint, coulomb: &Coulomb) -> (f64, f64) {
    let ln_mag = ln_circular_radial(n, point.r, coulomb) + ln_circular_angular(n, point.theta);
    (ln_mag, f64::from(n - 1) * point.phi)
}

/// `u_{n,n-1,n-1}(r, θ, φ) = N_n r^{n-1} e^{-r/(n a)} sin^{n-1}θ e^{i(n-1)φ}`.
///
/// Exact zeros (origin, polar axis) are returned as zero. A nonzero value
/// outside the normal `f64` range is reported as [`Error::Range`].
pub fn eval_circular(idx: CircularStateIndex, point: &SphericalPoint, coulomb: &Coulomb) -> Result<C64> {
    let n = idx.n();
    if !(point.r >= 0.0) || !point.r.is_finite() {
        return Err(invalid("r", format!("must be finite and >= 0, got {}", point.r)));
    }
    let (ln_mag, phase) = ln_circular_amplitude(n, point, coulomb);
    if ln_mag == f64::NEG_INFINITY {
        return Ok(C64::new(0.0, 0.0));
    }
    if ln_mag < f64::MIN_POSITIVE.ln() || ln_mag > f64::MAX.ln() {
        return Err(Error::Range { n, r: point.r });
    }
    Ok(C64::from_polar(ln_mag.exp(), phase))
}

/// Generalized Laguerre polynomial `L_k^α(x)` by the three-term recurrence.
pub fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..k {
        let jf = f64::from(j);
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal `Y_l^m(θ, φ)`; `Y_l^l` is positive at φ = 0 and
/// `Y_l^{-m} = conj(Y_l^m)`.
pub fn spherical_harmonic(l: u32, m: i64, theta: f64, phi: f64) -> C64 {
    let am = m.unsigned_abs() as u32;
    debug_assert!(am <= l);
    let (s, c) = theta.sin_cos();
    // P̄_m^m in log space, then the upward recurrence on a unit-scaled value
    let mut ln_top = 0.5 * (f64::from(2 * am + 1) / (4.0 * PI)).ln();
    for k in 1..=am {
        ln_top += 0.5 * (f64::from(2 * k - 1) / f64::from(2 * k)).ln();
    }
    let sign_s = if s < 0.0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let ln_sin = if am == 0 { 0.0 } else { f64::from(am) * s.abs().ln() };
    let mut p_cur = 1.0;
    if l > am {
        let amf = f64::from(am);
        let mut p_next = (2.0 * amf + 3.0).sqrt() * c * p_cur;
        for ll in (am + 2)..=l {
            let lf = f64::from(ll);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - amf * amf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - amf * amf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let p = a * (c * p_next - b * p_cur);
            p_cur = p_next;
            p_next = p;
        }
        p_cur = p_next;
    }
    let mag = sign_s * p_cur * (ln_top + ln_sin).exp();
    C64::from_polar(1.0, m as f64 * phi) * mag
}

/// Radial function `R_nl(r)`, unit-normalized against `r² dr`.
pub fn radial_nl(n: u32, l: u32, r: f64, coulomb: &Coulomb) -> f64 {
    let a = coulomb.length_scale();
    let nf = f64::from(n);
    let rho = 2.0 * r / (nf * a);
    let ln_norm = 0.5 * (3.0 * (2.0 / (nf * a)).ln() + ln_factorial(n - l - 1) - (2.0 * nf).ln() - ln_factorial(n + l));
    let lag = laguerre(n - l - 1, f64::from(2 * l + 1), rho);
    if lag == 0.0 || (rho == 0.0 && l > 0) {
        return 0.0;
    }
    let ln_rho_l = if l == 0 { 0.0 } else { f64::from(l) * rho.ln() };
    lag.signum() * (ln_norm - 0.5 * rho + ln_rho_l + lag.abs().ln()).exp()
}

/// General hydrogen eigenfunction `u_nlm`, unit-normalized.
///
/// `R_nl = sqrt((2/(na))³ (n-l-1)! / (2n (n+l)!)) e^{-ρ/2} ρ^l L_{n-l-1}^{2l+1}(ρ)`, ρ = 2r/(na).
pub fn eval_u_nlm(n: i64, l: i64, m: i64, point: &SphericalPoint, coulomb: &Coulomb) -> Result<C64> {
    if n < 1 || l < 0 || l >= n || m.abs() > l || n > i64::from(MAX_N) {
        return Err(Error::QuantumNumbers { n, l, m });
    }
    if !(point.r >= 0.0) || !point.r.is_finite() {
        return Err(invalid("r", format!("must be finite and >= 0, got {}", point.r)));
    }
    let (nu, lu) = (n as u32, l as u32);
    let radial = radial_nl(nu, lu, point.r, coulomb);
    Ok(spherical_harmonic(lu, m, point.theta, point.phi) * radial)
}

/// Angular factor shared by the in-plane matrix elements between `l` and `l+1`:
/// `∫ Y_l^l* sinθ cosφ Y_{l+1}^{l+1} dΩ = π c_l c_{l+1} ∫ sin^{2l+3}θ dθ`.
fn ln_inplane_angular(l: u32) -> f64 {
    let lf = f64::from(l);
    // ∫_0^π sin^{2l+3} = 2 (2^{l+1} (l+1)!)² / (2l+3)!
    let ln_sin_integral = 2f64.ln() + 2.0 * ((lf + 1.0) * 2f64.ln() + ln_factorial(l + 1)) - ln_factorial(2 * l + 3);
    PI.ln() + ln_sph_top(l) + ln_sph_top(l + 1) + ln_sin_integral
}

/// Radial overlap `∫ R_n R_{n+1} r^power dr` for adjacent circular states.
fn ln_adjacent_radial(n: u32, power: u32, coulomb: &Coulomb) -> f64 {
    let a = coulomb.length_scale();
    let nf = f64::from(n);
    let beta = (2.0 * nf + 1.0) / (nf * (nf + 1.0) * a);
    // ∫ r^{2n-1+power} e^{-βr} dr = (2n-1+power)! / β^{2n+power}
    let k = 2 * n - 1 + power;
    ln_radial_norm(n, a) + ln_radial_norm(n + 1, a) + ln_factorial(k) - f64::from(k + 1) * beta.ln()
}

/// `⟨u_n | x | u_{n+1}⟩` from closed-form Gamma-function expressions.
pub fn circular_dipole(n: u32, coulomb: &Coulomb) -> Result<DipoleElement> {
    if n < 1 {
        return Err(invalid("n", "principal quantum number must be >= 1"));
    }
    let value = (ln_adjacent_radial(n, 3, coulomb) + ln_inplane_angular(n - 1)).exp();
    Ok(DipoleElement { n, value })
}

/// `⟨u_n | x / r³ | u_{n+1}⟩`: the in-plane Coulomb field element that
/// drives the Ehrenfest force on the nucleus.
pub fn circular_field_element(n: u32, coulomb: &Coulomb) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n", "principal quantum number must be >= 1"));
    }
    Ok((ln_adjacent_radial(n, 0, coulomb) + ln_inplane_angular(n - 1)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{composite_legendre, laguerre as gl_rule, legendre_on};

    fn unit() -> Coulomb {
        Coulomb::new(1.0).unwrap()
    }

    /// Lowest eigenvalue of the radial Coulomb Hamiltonian for angular
    /// momentum `l`, by finite differences on a logarithmic grid.
    ///
    /// With r = e^s and u = r R = e^{s/2} w the radial equation becomes the
    /// symmetric generalized problem
    /// `[-(w'' - w/4)/(2m) + l(l+1)/(2m) w - e^s w] = E e^{2s} w`,
    /// solved by shifted inverse iteration on the tridiagonal
    /// matrix with a fixed shift. Two grids are Richardson-combined to remove the O(h²) error.
    fn fd_lowest_energy(mass: f64, l: u32, guess: f64) -> f64 {
        let solve = |n: usize| -> f64 {
            let (s0, s1) = ((1e-7f64 / mass).ln(), (150.0f64 / mass).ln());
            let h = (s1 - s0) / (n + 1) as f64;
            let lf = f64::from(l);
            let s: Vec<f64> = (1..=n).map(|i| s0 + i as f64 * h).collect();
            let diag: Vec<f64> =
                s.iter().map(|&si| (2.0 / (h * h) + 0.25 + lf * (lf + 1.0)) / (2.0 * mass) - si.exp()).collect();
            let off = -1.0 / (2.0 * mass * h * h);
            let b: Vec<f64> = s.iter().map(|&si| (2.0 * si).exp()).collect();
            let e = guess;
            let mut rq = e;
            let mut w = vec![1.0; n];
            for _ in 0..40 {
                let rhs: Vec<f64> = (0..n).map(|i| b[i] * w[i]).collect();
                let d: Vec<f64> = (0..n).map(|i| diag[i] - e * b[i]).collect();
                let mut cp = vec![0.0; n];
                let mut dp = vec![0.0; n];
                cp[0] = off / d[0];
                dp[0] = rhs[0] / d[0];
                for i in 1..n {
                    let m = d[i] - off * cp[i - 1];
                    cp[i] = off / m;
                    dp[i] = (rhs[i] - off * dp[i - 1]) / m;
                }
                let mut x = vec![0.0; n];
                x[n - 1] = dp[n - 1];
                for i in (0..n - 1).rev() {
                    x[i] = dp[i] - cp[i] * x[i + 1];
                }
                let (mut num, mut den) = (0.0, 0.0);
                for i in 0..n {
                    let ax = diag[i] * x[i]
                        + if i > 0 { off * x[i - 1] } else { 0.0 }
                        + if i + 1 < n { off * x[i + 1] } else { 0.0 };
                    num += x[i] * ax;
                    den += x[i] * b[i] * x[i];
                }
                rq = num / den;
                let norm = den.sqrt();
                w = x.iter().map(|v| v / norm).collect();
            }
            rq
        };
        let coarse = solve(4000);
        let fine = solve(8001);
        fine + (fine - coarse) / 3.0
    }

    #[test]
    fn ground_energy_matches_log_grid_diagonalization() {
        let fd = fd_lowest_energy(1.0, 0, -0.45);
        assert!((fd + 0.5).abs() < 1e-6, "fd={fd}");
        assert_eq!(bohr_energy(1, &unit()).unwrap(), -0.5);
    }

    #[test]
    fn reduced_mass_level_two() {
        let params = AtomParams::hydrogen();
        let mu = params.reduced_mass();
        assert!((mu - 0.999456).abs() < 1e-6);
        let e2 = bohr_energy(2, &Coulomb::relative(&params)).unwrap();
        assert!((e2 + 0.124932).abs() < 1e-6, "{e2}");
        // l = 1: the lowest level is n = 2
        let fd = fd_lowest_energy(mu, 1, -0.11);
        assert!((fd - e2).abs() < 1e-6, "fd={fd}");
    }

    #[test]
    fn energies_rise_monotonically_to_zero() {
        let c = unit();
        let mut last = f64::NEG_INFINITY;
        for n in 1..=500 {
            let e = bohr_energy(n, &c).unwrap();
            assert!(e > last && e < 0.0);
            last = e;
        }
        assert!(last > -1e-5);
        assert!(bohr_energy(0, &c).is_err());
    }

    #[test]
    fn circular_norm_by_gauss_quadrature() {
        let c = unit();
        for n in [1u32, 2, 3, 5, 10, 20, 40, 60, 100, 150, 200] {
            let lf = f64::from(n);
            // |u|² r² = N² r^{2n} e^{-2r/n} |Θ|²; substitute x = 2r/n
            let radial: f64 = if n <= 10 {
                gl_rule(n as usize + 2, 0.0)
                    .iter()
                    .map(|&(x, w)| {
                        let r = 0.5 * lf * x;
                        w * (2.0 * ln_circular_radial(n, r, &c) + 2.0 * r.ln() + x).exp() * 0.5 * lf
                    })
                    .sum()
            } else {
                // peaked integrand: composite Legendre over the support
                composite_legendre(20, 200, 0.0, 4.0 * lf * lf + 40.0 * lf)
                    .iter()
                    .map(|&(r, w)| w * (2.0 * ln_circular_radial(n, r, &c) + 2.0 * r.ln()).exp())
                    .sum()
            };
            // u = cos θ turns sin^{2l+1}θ dθ into a polynomial in u
            let angular: f64 = legendre_on(n as usize + 2, -1.0, 1.0)
                .iter()
                .map(|&(u, w)| w * (2.0 * ln_circular_angular(n, u.acos())).exp())
                .sum::<f64>()
                * 2.0
                * PI;
            assert!((radial * angular - 1.0).abs() < 1e-10, "n={n}: {}", radial * angular);
        }
    }

    #[test]
    fn ground_state_is_spherical() {
        let c = unit();
        let i = CircularStateIndex::new(1).unwrap();
        let a = eval_circular(i, &SphericalPoint::new(0.7, 0.1, 0.3), &c).unwrap();
        let b = eval_circular(i, &SphericalPoint::new(0.7, 2.0, -2.5), &c).unwrap();
        assert!((a - b).norm() < 1e-15);
        assert!((a.re - (-0.7f64).exp() / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn radial_probability_peaks_at_n_squared() {
        let c = unit();
        for n in [1u32, 2, 5, 30, 60, 200] {
            let nf = f64::from(n);
            let f = |r: f64| 2.0 * ln_circular_radial(n, r, &c) + 2.0 * r.ln();
            // golden section search on [0.2 n², 3 n²]
            let (mut a, mut b) = (0.2 * nf * nf, 3.0 * nf * nf);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..200 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if f(x1) > f(x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            let peak = 0.5 * (a + b);
            assert!((peak - nf * nf).abs() < 1e-6 * nf * nf, "n={n} peak={peak}");
        }
    }

    #[test]
    fn range_errors_only_for_unrepresentable_values() {
        let c = unit();
        let i = CircularStateIndex::new(200).unwrap();
        // the n = 200 amplitude underflows f64 for r below a few hundred bohr
        for r in [500.0, 5_000.0, 40_000.0, 200_000.0] {
            assert!(eval_circular(i, &SphericalPoint::new(r, PI / 2.0, 0.0), &c).is_ok(), "r={r}");
        }
        assert!(matches!(eval_circular(i, &SphericalPoint::new(10.0, PI / 2.0, 0.0), &c), Err(Error::Range { .. })));
        assert_eq!(eval_circular(i, &SphericalPoint::new(0.0, 1.0, 0.0), &c).unwrap(), C64::new(0.0, 0.0));
        assert!(eval_circular(i, &SphericalPoint::new(-1.0, 1.0, 0.0), &c).is_err());
    }

    #[test]
    fn general_eigenfunction_node_and_circular_agreement() {
        let c = unit();
        let v = eval_u_nlm(2, 1, 1, &SphericalPoint::new(3.0, 0.0, 0.4), &c).unwrap();
        assert_eq!(v.norm(), 0.0);
        for n in [1i64, 2, 3, 7, 15, 40] {
            let idx = CircularStateIndex::new(n as u32).unwrap();
            for &(r, t, p) in
                &[(0.5, 0.3, 0.1), (9.0, 1.2, -2.0), (20.0, 1.9, 2.9), (1.5 * (n * n) as f64, PI / 2.0, 0.0)]
            {
                let pt = SphericalPoint::new(r, t, p);
                let u = eval_u_nlm(n, n - 1, n - 1, &pt, &c).unwrap();
                let w = eval_circular(idx, &pt, &c).unwrap();
                assert!((u - w).norm() <= 1e-12 * w.norm(), "n={n} {u} {w}");
            }
        }
        assert!(eval_u_nlm(2, 2, 0, &SphericalPoint::new(1.0, 1.0, 1.0), &c).is_err());
        assert!(eval_u_nlm(3, 1, -2, &SphericalPoint::new(1.0, 1.0, 1.0), &c).is_err());
    }

    #[test]
    fn orthonormality_up_to_n_twelve() {
        let c = unit();
        // radial overlaps for every pair sharing l (the angular factor is δ_ll' δ_mm')
        let rq = composite_legendre(24, 40, 0.0, 500.0);
        for l in 0..12u32 {
            for n1 in (l + 1)..=12 {
                for n2 in n1..=12 {
                    let s: f64 =
                        rq.iter().map(|&(r, w)| w * r * r * radial_nl(n1, l, r, &c) * radial_nl(n2, l, r, &c)).sum();
                    let expect = if n1 == n2 { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-8, "n={n1},{n2} l={l}: {s}");
                }
            }
        }
        // angular overlaps of every (l, m) pair with l <= 11
        let tq = legendre_on(48, 0.0, PI);
        let nphi = 48;
        let mut lm = Vec::new();
        for l in 0..12i64 {
            for m in -l..=l {
                lm.push((l as u32, m));
            }
        }
        let grid: Vec<(f64, f64, f64)> = tq
            .iter()
            .flat_map(|&(t, w)| {
                (0..nphi).map(move |k| (t, 2.0 * PI * k as f64 / nphi as f64, w * t.sin() * 2.0 * PI / nphi as f64))
            })
            .collect();
        let values: Vec<Vec<C64>> =
            lm.iter().map(|&(l, m)| grid.iter().map(|&(t, p, _)| spherical_harmonic(l, m, t, p)).collect()).collect();
        for i in 0..lm.len() {
            for j in i..lm.len() {
                let s: C64 = grid.iter().enumerate().map(|(k, g)| values[i][k].conj() * values[j][k] * g.2).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).norm() < 1e-8, "{:?} {:?}: {s}", lm[i], lm[j]);
            }
        }
        // and a few full 3-d overlaps through eval_u_nlm itself
        let pairs = [
            ((3, 1, 1), (3, 1, 1)),
            ((3, 1, 1), (5, 1, 1)),
            ((4, 2, -1), (4, 2, -1)),
            ((4, 2, -1), (4, 2, 1)),
            ((2, 0, 0), (6, 0, 0)),
        ];
        let rq = composite_legendre(20, 10, 0.0, 150.0);
        let tq = legendre_on(16, 0.0, PI);
        for ((n1, l1, m1), (n2, l2, m2)) in pairs {
            let mut s = C64::new(0.0, 0.0);
            for &(r, wr) in &rq {
                for &(t, wt) in &tq {
                    for k in 0..16 {
                        let p = 2.0 * PI * k as f64 / 16.0;
                        let pt = SphericalPoint::new(r, t, p);
                        let a = eval_u_nlm(n1, l1, m1, &pt, &c).unwrap();
                        let b = eval_u_nlm(n2, l2, m2, &pt, &c).unwrap();
                        s += a.conj() * b * wr * r * r * wt * t.sin() * 2.0 * PI / 16.0;
                    }
                }
            }
            let expect = if (n1, l1, m1) == (n2, l2, m2) { 1.0 } else { 0.0 };
            assert!((s - expect).norm() < 1e-8, "{:?} {:?}: {s}", (n1, l1, m1), (n2, l2, m2));
        }
    }

    #[test]
    fn dipole_n1_matches_quadrature() {
        let c = unit();
        let d = circular_dipole(1, &c).unwrap();
        let r10 = |r: f64| 2.0 * (-r).exp();
        let r21 = |r: f64| r * (-r / 2.0).exp() / (24f64).sqrt();
        let rad: f64 = gl_rule(40, 0.0)
            .iter()
            .map(|&(x, w)| {
                // ∫ r³ R10 R21 dr with e^{-3r/2}: substitute r = 2x/3
                let r = 2.0 * x / 3.0;
                w * (r.powi(3) * r10(r) * r21(r)) * x.exp() * 2.0 / 3.0
            })
            .sum();
        // ∫ Y00 sinθ cosφ Y11 dΩ, Y00 = 1/√(4π), Y11 = √(3/(8π)) sinθ e^{iφ}
        let ang: f64 = legendre_on(30, 0.0, PI).iter().map(|&(t, w)| w * t.sin().powi(3)).sum::<f64>()
            * PI
            * (1.0 / (4.0 * PI)).sqrt()
            * (3.0 / (8.0 * PI)).sqrt();
        assert!((d.value - rad * ang).abs() < 1e-10, "{} vs {}", d.value, rad * ang);
        assert!(d.value > 0.0);
    }

    #[test]
    fn dipole_matches_quadrature_for_rydberg_levels() {
        let c = unit();
        for n in [5u32, 30, 60] {
            let d = circular_dipole(n, &c).unwrap().value;
            let nf = f64::from(n);
            let rad: f64 = composite_legendre(20, 200, 0.0, 8.0 * nf * nf)
                .iter()
                .map(|&(r, w)| {
                    w * (ln_circular_radial(n, r, &c) + ln_circular_radial(n + 1, r, &c) + 3.0 * r.ln()).exp()
                })
                .sum();
            let ang: f64 = legendre_on(n as usize + 4, -1.0, 1.0)
                .iter()
                .map(|&(u, w)| {
                    let t = u.acos();
                    w * (ln_circular_angular(n, t) + ln_circular_angular(n + 1, t)).exp() * t.sin()
                })
                .sum::<f64>()
                * PI;
            assert!((d - rad * ang).abs() < 1e-9 * d, "n={n}");
        }
    }

    #[test]
    fn dipole_scales_like_orbit_radius() {
        let c = unit();
        let ratios: Vec<f64> =
            (20..=100).step_by(10).map(|n| circular_dipole(n, &c).unwrap().value / f64::from(n * n)).collect();
        for w in ratios.windows(2) {
            assert!((w[1] - w[0]).abs() < 2e-3);
        }
        let last = *ratios.last().unwrap();
        assert!((0.4..0.6).contains(&last), "{last}");
        // mass rescaling is pure length rescaling: d(mu) = d(1) / mu
        let mu = 0.37;
        let dm = circular_dipole(17, &Coulomb::new(mu).unwrap()).unwrap().value;
        let d1 = circular_dipole(17, &c).unwrap().value;
        assert!((dm * mu - d1).abs() < 1e-12 * d1);
    }

    #[test]
    fn spectrum_is_degenerate_and_shift_independent() {
        let c = Coulomb::relative(&AtomParams::hydrogen());
        for n in 1..30u32 {
            let e = bohr_energy(n, &c).unwrap();
            // energy of the normalized eigenfunction expressed about any origin
            // is a property of the level alone
            for _l in 0..n {
                assert_eq!(bohr_energy(n, &c).unwrap(), e);
            }
        }
    }

    #[test]
    fn field_element_matches_quadrature() {
        let c = unit();
        for n in [1u32, 4, 60] {
            let f = circular_field_element(n, &c).unwrap();
            let nf = f64::from(n);
            let rad: f64 = composite_legendre(20, 200, 0.0, 8.0 * nf * nf + 40.0)
                .iter()
                .map(|&(r, w)| w * (ln_circular_radial(n, r, &c) + ln_circular_radial(n + 1, r, &c)).exp())
                .sum();
            let ang: f64 = legendre_on(n as usize + 4, -1.0, 1.0)
                .iter()
                .map(|&(u, w)| {
                    let t = u.acos();
                    w * (ln_circular_angular(n, t) + ln_circular_angular(n + 1, t)).exp() * t.sin()
                })
                .sum::<f64>()
                * PI;
            assert!((f - rad * ang).abs() < 1e-9 * f, "n={n}: {f} vs {}", rad * ang);
        }
    }
}
