//! The circular Rydberg packet and its coefficient-sum observables.

use serde::{Deserialize, Serialize};

use crate::basis::{circular_dipole, Coulomb};
use crate::error::{invalid, Error, Result};
use crate::{AtomParams, PacketSpec, Vec3, C64};

/// Largest fraction of the Gaussian weight a window may discard.
pub const WINDOW_TRUNCATION_LIMIT: f64 = 1e-12;
/// Largest fraction of the Gaussian weight that may fall below n = 1.
pub const LOW_CLIP_LIMIT: f64 = 1e-6;

/// Superposition `Σ c_n u_{n,n-1,n-1}` over a contiguous window of `n`.
///
/// Holds the t = 0 coefficients; observables at time t apply the phases
/// `exp(-i E_n t)` on the fly, so nothing accumulates rounding with time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularPacket {
    pub params: AtomParams,
    pub spec: PacketSpec,
    pub coulomb: Coulomb,
    n_lo: u32,
    coeffs: Vec<C64>,
    dipoles: Vec<f64>,
}

/// Gaussian circular packet for the relative motion (reduced mass).
pub fn build_packet(spec: &PacketSpec, params: &AtomParams) -> Result<CircularPacket> {
    CircularPacket::gaussian(spec, params, Coulomb::relative(params))
}

fn gaussian_weight(n: f64, spec: &PacketSpec) -> f64 {
    let d = n - spec.n_bar;
    (-d * d / (4.0 * spec.sigma_n * spec.sigma_n)).exp()
}

impl CircularPacket {
    /// `c_n ∝ exp(-(n - n̄)² / (4σ²))` for an arbitrary orbiting mass.
    pub fn gaussian(spec: &PacketSpec, params: &AtomParams, coulomb: Coulomb) -> Result<Self> {
        spec.validate()?;
        let (lo, hi) = spec.window;
        // probability weight outside the window, summed over n >= 1
        let reach = (spec.n_bar + 40.0 * spec.sigma_n + 10.0).ceil() as u32;
        let mut inside = 0.0;
        let mut outside = 0.0;
        for n in 1..=reach.max(hi) {
            let w = gaussian_weight(f64::from(n), spec).powi(2);
            if (lo..=hi).contains(&n) {
                inside += w;
            } else {
                outside += w;
            }
        }
        // weight the Gaussian would place at n <= 0
        let below: f64 = (0..=reach).map(|k| gaussian_weight(-f64::from(k), spec).powi(2)).sum();
        if below > LOW_CLIP_LIMIT * (inside + outside + below) {
            return Err(Error::Packet(format!(
                "n = 1 clips {:.3e} of the weight (n_bar={}, sigma_n={})",
                below / (inside + outside + below),
                spec.n_bar,
                spec.sigma_n
            )));
        }
        if outside > WINDOW_TRUNCATION_LIMIT * (inside + outside) {
            return Err(Error::Packet(format!(
                "window [{lo}, {hi}] discards {:.3e} of the weight",
                outside / (inside + outside)
            )));
        }
        let raw: Vec<f64> = (lo..=hi).map(|n| gaussian_weight(f64::from(n), spec)).collect();
        let norm = raw.iter().map(|w| w * w).sum::<f64>().sqrt();
        let coeffs = raw.iter().map(|w| C64::new(w / norm, 0.0)).collect();
        Self::from_coefficients(*spec, *params, coulomb, lo, coeffs)
    }

    /// Arbitrary coefficients `coeffs[k]` for `n = n_lo + k`, renormalized.
    pub fn from_coefficients(
        spec: PacketSpec,
        params: AtomParams,
        coulomb: Coulomb,
        n_lo: u32,
        mut coeffs: Vec<C64>,
    ) -> Result<Self> {
        if n_lo < 1 {
            return Err(invalid("n_lo", "principal quantum number must be >= 1"));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if coeffs.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Packet("coefficients must be finite and not all zero".into()));
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        let n_hi = n_lo + coeffs.len() as u32 - 1;
        let dipoles = (n_lo..n_hi).map(|n| circular_dipole(n, &coulomb).map(|d| d.value)).collect::<Result<_>>()?;
        Ok(Self { params, spec, coulomb, n_lo, coeffs, dipoles })
    }

    pub fn n_lo(&self) -> u32 {
        self.n_lo
    }

    pub fn n_hi(&self) -> u32 {
        self.n_lo + self.coeffs.len() as u32 - 1
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.n_lo..=self.n_hi()
    }

    /// Initial coefficients.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels().map(|n| self.coulomb.energy(n)).collect()
    }

    /// `c_n(t) = c_n(0) exp(-i E_n t)`.
    pub fn coeffs_at(&self, t: f64) -> Vec<C64> {
        self.coeffs
            .iter()
            .zip(self.levels())
            .map(|(c, n)| c * C64::from_polar(1.0, -self.coulomb.energy(n) * t))
            .collect()
    }

    pub fn norm_sq(&self, t: f64) -> f64 {
        self.coeffs_at(t).iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ |c_n|² E_n`.
    pub fn mean_energy(&self) -> f64 {
        self.coeffs.iter().zip(self.levels()).map(|(c, n)| c.norm_sqr() * self.coulomb.energy(n)).sum()
    }

    /// `z_n = c_n* c_{n+1}` for the given coefficients, paired with `ω_n = E_n - E_{n+1}`.
    fn adjacent<'a>(&'a self, c: &'a [C64]) -> impl Iterator<Item = (f64, C64, f64)> + 'a {
        (0..self.dipoles.len()).map(move |k| {
            let n = self.n_lo + k as u32;
            let omega = self.coulomb.energy(n) - self.coulomb.energy(n + 1);
            (self.dipoles[k], c[k].conj() * c[k + 1], omega)
        })
    }

    /// `⟨r⟩ = 2 Σ d_n (Re z_n, -Im z_n, 0)` for coefficients over this window.
    pub fn center_of(&self, c: &[C64]) -> Vec3 {
        let (mut x, mut y) = (0.0, 0.0);
        for (d, z, _) in self.adjacent(c) {
            x += 2.0 * d * z.re;
            y -= 2.0 * d * z.im;
        }
        Vec3::new(x, y, 0.0)
    }

    /// `mass · d⟨r⟩/dt` under free phase evolution, from `dz_n/dt = i ω_n z_n`.
    pub fn momentum_of(&self, c: &[C64]) -> Vec3 {
        let (mut vx, mut vy) = (0.0, 0.0);
        for (d, z, omega) in self.adjacent(c) {
            vx -= 2.0 * d * omega * z.im;
            vy -= 2.0 * d * omega * z.re;
        }
        Vec3::new(vx, vy, 0.0) * self.coulomb.mass
    }

    /// `⟨r⟩(t)` in the orbital plane (z = 0).
    pub fn relative_center(&self, t: f64) -> Vec3 {
        self.center_of(&self.coeffs_at(t))
    }

    /// `⟨p⟩ = mass · d⟨r⟩/dt`, differentiating the phase factors analytically.
    pub fn relative_momentum(&self, t: f64) -> Vec3 {
        self.momentum_of(&self.coeffs_at(t))
    }

    /// `⟨x/r³⟩` and `⟨y/r³⟩` from the adjacent field elements.
    pub fn field_of(&self, c: &[C64]) -> Result<Vec3> {
        let (mut fx, mut fy) = (0.0, 0.0);
        for (k, (_, z, _)) in self.adjacent(c).enumerate() {
            let f = crate::basis::circular_field_element(self.n_lo + k as u32, &self.coulomb)?;
            fx += 2.0 * f * z.re;
            fy -= 2.0 * f * z.im;
        }
        Ok(Vec3::new(fx, fy, 0.0))
    }

    /// `|Σ |c_n|² exp(-i E_n t)|²`.
    pub fn autocorrelation(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(self.levels())
            .map(|(c, n)| c.norm_sqr() * C64::from_polar(1.0, -self.coulomb.energy(n) * t))
            .sum::<C64>()
            .norm_sqr()
    }

    /// `|⟨r⟩(t)| / |⟨r⟩(0)|`; zero for a stationary state.
    pub fn localization(&self, t: f64) -> f64 {
        let r0 = self.relative_center(0.0).norm();
        if r0 == 0.0 {
            0.0
        } else {
            self.relative_center(t).norm() / r0
        }
    }
}

/// Pure phase evolution; returns a copy whose t = 0 coefficients are `c_n(t)`.
pub fn evolve_coeffs(packet: &CircularPacket, t: f64) -> CircularPacket {
    let mut out = packet.clone();
    out.coeffs = packet.coeffs_at(t);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub t_kepler: f64,
    pub t_spread: f64,
    /// Relocalization of the packet shape, `(n̄/3) t_kepler`.
    pub t_rev: f64,
    /// Full autocorrelation revival, `(2n̄/3) t_kepler`.
    pub t_full_revival: f64,
}

/// Fraction of `|⟨r⟩(0)|` below which the packet counts as spread.
pub const SPREAD_THRESHOLD: f64 = 0.1;
/// Samples per Kepler period in time-scale scans.
pub const SCAN_RESOLUTION: usize = 200;

/// `2π n̄³ / mass` for the packet's orbiting mass.
pub fn kepler_period(spec: &PacketSpec, coulomb: &Coulomb) -> f64 {
    coulomb.kepler_period(spec.n_bar)
}

/// Kepler period, revival times, and the measured spreading time.
pub fn time_scales(packet: &CircularPacket) -> Result<TimeScales> {
    let spec = &packet.spec;
    if spec.n_bar < 5.0 {
        return Err(invalid("n_bar", format!("time scales need n_bar >= 5, got {}", spec.n_bar)));
    }
    let t_kepler = kepler_period(spec, &packet.coulomb);
    let t_rev = spec.n_bar / 3.0 * t_kepler;
    let t_spread = spreading_time(packet, t_kepler, t_rev)?;
    Ok(TimeScales { t_kepler, t_spread, t_rev, t_full_revival: 2.0 * t_rev })
}

/// First t with `|⟨r⟩| < 0.1·|⟨r⟩(0)|` sustained for one Kepler period,
/// scanning up to `horizon`.
pub fn spreading_time(packet: &CircularPacket, t_kepler: f64, horizon: f64) -> Result<f64> {
    let dt = t_kepler / SCAN_RESOLUTION as f64;
    let steps = (horizon / dt).ceil() as usize;
    let below: Vec<bool> =
        (0..=steps + SCAN_RESOLUTION).map(|k| packet.localization(k as f64 * dt) < SPREAD_THRESHOLD).collect();
    (0..=steps)
        .find(|&k| below[k..=k + SCAN_RESOLUTION].iter().all(|&b| b))
        .map(|k| k as f64 * dt)
        .ok_or(Error::NoSpreading { horizon })
}

/// Densely sampled `(t, value)` series of a scalar observable.
pub fn scan(t_end: f64, samples: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (0..=samples)
        .map(|k| {
            let t = t_end * k as f64 / samples as f64;
            (t, f(t))
        })
        .collect()
}

/// Location of the largest autocorrelation value in `[t_lo, t_hi]`,
/// refined by golden-section search around the best sample.
pub fn autocorrelation_peak(packet: &CircularPacket, t_lo: f64, t_hi: f64, samples: usize) -> (f64, f64) {
    let h = (t_hi - t_lo) / samples as f64;
    let (mut best_t, mut best) = (t_lo, packet.autocorrelation(t_lo));
    for k in 1..=samples {
        let t = t_lo + k as f64 * h;
        let v = packet.autocorrelation(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = ((best_t - h).max(t_lo), (best_t + h).min(t_hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if packet.autocorrelation(x1) > packet.autocorrelation(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t = 0.5 * (a + b);
    (t, packet.autocorrelation(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn default_packet() -> CircularPacket {
        build_packet(&PacketSpec::default(), &AtomParams::hydrogen()).unwrap()
    }

    #[test]
    fn gaussian_weights_and_normalization() {
        let p = default_packet();
        let c = p.coeffs();
        assert_eq!((p.n_lo(), p.n_hi()), (54, 66));
        let k60 = 60 - 54;
        assert!(c.iter().all(|v| v.re > 0.0 && v.im == 0.0));
        assert!(c.iter().all(|v| v.re <= c[k60].re));
        assert!((c[k60 + 1].re / c[k60].re - (-1.0f64 / (4.0 * 0.64)).exp()).abs() < 1e-14);
        let s: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn narrow_packet_is_single_state() {
        let spec = PacketSpec::new(10.0, 1e-6, 1.0).unwrap();
        let p = build_packet(&spec, &AtomParams::hydrogen()).unwrap();
        assert_eq!(p.coeffs().len(), 1);
        assert_eq!(p.coeffs()[0], C64::new(1.0, 0.0));
        for t in [0.0, 1e3, 7.7e6] {
            assert_eq!(p.relative_center(t), Vec3::zeros());
            assert_eq!(p.relative_momentum(t), Vec3::zeros());
            assert!((p.autocorrelation(t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn truncating_windows_are_rejected() {
        let params = AtomParams::hydrogen();
        let narrow = PacketSpec::default().with_window(58, 62).unwrap();
        assert!(matches!(build_packet(&narrow, &params), Err(Error::Packet(_))));
        let clipped = PacketSpec::new(2.0, 1.5, 1.0).unwrap();
        assert!(matches!(build_packet(&clipped, &params), Err(Error::Packet(_))));
    }

    #[test]
    fn momentum_matches_centered_differences() {
        let p = default_packet();
        let tk = kepler_period(&p.spec, &p.coulomb);
        let h = tk / 1e4;
        let scale = p.coulomb.mass * p.relative_center(0.0).norm() / tk;
        for t in [0.0, 0.37 * tk, 3.1 * tk, 12.4 * tk] {
            // fourth-order centered stencil; the three-point one alone carries
            // a truncation error of (2π/10⁴)²/6 · 2π ≈ 4e-7 in these units
            let r = |s: f64| p.relative_center(t + s * h);
            let fd = (r(-2.0) - r(-1.0) * 8.0 + r(1.0) * 8.0 - r(2.0)) / (12.0 * h) * p.coulomb.mass;
            let an = p.relative_momentum(t);
            assert!((fd - an).norm() < 1e-8 * scale, "t={t}: {}", (fd - an).norm() / scale);
        }
    }

    #[test]
    fn kepler_period_against_level_spacing() {
        let c = Coulomb::new(1.0).unwrap();
        let spec = PacketSpec::default();
        let tk = kepler_period(&spec, &c);
        assert!((tk - 2.0 * std::f64::consts::PI * 216_000.0).abs() < 1e-6);
        assert!((tk - 1.3572e6).abs() < 1e2);
        // the forward spacing E61 - E60 gives 1 + 2.507e-2; the centered
        // spacing (E61 - E59)/2 is accurate to O(1/n²)
        let spacing = 2.0 * std::f64::consts::PI / (c.energy(61) - c.energy(60));
        assert!((spacing / tk - 1.02507).abs() < 1e-5, "{}", spacing / tk);
        let centered = 4.0 * std::f64::consts::PI / (c.energy(61) - c.energy(59));
        assert!((centered / tk - 1.0).abs() < 1e-3);
        // the spacing-based period approaches 2π n³ / mass as n grows
        let big = 2.0 * std::f64::consts::PI / (c.energy(1001) - c.energy(1000));
        assert!((big / c.kepler_period(1000.0) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn revival_ordering_and_spreading_time() {
        let ts = time_scales(&default_packet()).unwrap();
        assert!((ts.t_rev / ts.t_kepler - 20.0).abs() < 1e-12);
        assert!(ts.t_kepler < ts.t_spread && ts.t_spread < ts.t_rev);
        let s = ts.t_spread / ts.t_kepler;
        assert!((8.0..=12.0).contains(&s), "{s}");
        assert!(time_scales(&build_packet(&PacketSpec::new(4.0, 0.3, 1.0).unwrap(), &AtomParams::hydrogen()).unwrap())
            .is_err());
    }

    #[test]
    fn localization_drops_within_one_period() {
        let p = default_packet();
        let tk = kepler_period(&p.spec, &p.coulomb);
        let half = p.localization(0.5 * tk);
        assert!(half < 1.0 && half > 0.5, "{half}");
        assert!(p.relative_center(0.0).y.abs() < 1e-12 * p.relative_center(0.0).x);
        assert!(p.relative_center(0.0).x > 0.0);
        // counter-clockwise: y grows first
        assert!(p.relative_center(0.1 * tk).y > 0.0);
    }

    #[test]
    fn long_time_average_momentum_is_boundary_term() {
        // the mean of d<r>/dt over [0, T] is exactly (r(T) - r(0)) / T
        let p = default_packet();
        let ts = time_scales(&p).unwrap();
        let t = ts.t_full_revival;
        let n = 200_000;
        let h = t / n as f64;
        let mut acc = Vec3::zeros();
        for k in 0..=n {
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc += p.relative_momentum(k as f64 * h) * w * h;
        }
        let mean = acc / t;
        let exact = (p.relative_center(t) - p.relative_center(0.0)) * p.coulomb.mass / t;
        assert!((mean - exact).norm() < 1e-9, "{:e}", (mean - exact).norm());
        // small against the instantaneous amplitude mass/n̄
        assert!(mean.norm() < 1e-2 * p.coulomb.mass / p.spec.n_bar);
    }

    proptest! {
        #[test]
        fn evolution_preserves_norm(t in -1e8f64..1e8) {
            let p = default_packet();
            prop_assert!((p.norm_sq(t) - 1.0).abs() < 1e-14);
            let e = evolve_coeffs(&p, t);
            let back = evolve_coeffs(&e, -t);
            for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn autocorrelation_in_unit_interval(t in 0f64..3e7) {
            let a = default_packet().autocorrelation(t);
            prop_assert!((0.0..=1.0 + 1e-14).contains(&a));
        }
    }
}
