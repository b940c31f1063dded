//! Hartree atomic units and the two parameter objects shared by every scenario.
//!
//! Internally ħ = m_e = a_B = e = 1. Conversions to SI are provided for
//! reporting only; no dynamics code ever sees an SI value.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// CODATA proton/electron mass ratio.
pub const PROTON_ELECTRON_MASS_RATIO: f64 = 1836.15267343;

/// CODATA 2018 values of the atomic units in SI.
pub mod si {
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    pub const TIME: f64 = 2.418_884_326_585_7e-17;
    pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const MOMENTUM: f64 = 1.992_851_914_10e-24;
}

/// Physical dimension of a reported quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    Length,
    Time,
    Energy,
    Mass,
    Momentum,
}

impl Dimension {
    /// Size of one atomic unit of this dimension, in SI.
    pub fn si_scale(self) -> f64 {
        match self {
            Dimension::Length => si::BOHR_RADIUS,
            Dimension::Time => si::TIME,
            Dimension::Energy => si::HARTREE,
            Dimension::Mass => si::ELECTRON_MASS,
            Dimension::Momentum => si::MOMENTUM,
        }
    }

    pub fn to_si(self, value: f64) -> f64 {
        value * self.si_scale()
    }

    pub fn from_si(self, value: f64) -> f64 {
        value / self.si_scale()
    }

    pub fn unit_label(self) -> &'static str {
        match self {
            Dimension::Length => "bohr",
            Dimension::Time => "au_time",
            Dimension::Energy => "hartree",
            Dimension::Mass => "m_e",
            Dimension::Momentum => "au_momentum",
        }
    }
}

/// Masses of the two-body problem in atomic units.
///
/// `total_mass` and `reduced_mass` are derived once at construction and the
/// struct is immutable afterwards, so the identities `M = m_e + m_p` and
/// `mu = m_e m_p / M` hold bit-for-bit for the lifetime of a value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    m_e: f64,
    m_p: f64,
    total_mass: f64,
    reduced_mass: f64,
}

impl AtomParams {
    /// Electron mass fixed to 1, proton mass `mass_ratio`.
    pub fn new(mass_ratio: f64) -> Result<Self> {
        if !mass_ratio.is_finite() || mass_ratio <= 0.0 {
            return Err(invalid("mass_ratio", format!("must be finite and > 0, got {mass_ratio}")));
        }
        Ok(Self::from_masses_unchecked(1.0, mass_ratio))
    }

    /// Physical hydrogen.
    pub fn hydrogen() -> Self {
        Self::from_masses_unchecked(1.0, PROTON_ELECTRON_MASS_RATIO)
    }

    fn from_masses_unchecked(m_e: f64, m_p: f64) -> Self {
        let total_mass = m_e + m_p;
        Self { m_e, m_p, total_mass, reduced_mass: m_e * m_p / total_mass }
    }

    pub fn electron_mass(&self) -> f64 {
        self.m_e
    }

    pub fn proton_mass(&self) -> f64 {
        self.m_p
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn reduced_mass(&self) -> f64 {
        self.reduced_mass
    }

    pub fn mass_ratio(&self) -> f64 {
        self.m_p / self.m_e
    }

    pub fn bohr_radius(&self) -> f64 {
        1.0
    }

    pub fn hbar(&self) -> f64 {
        1.0
    }
}

impl Default for AtomParams {
    fn default() -> Self {
        Self::hydrogen()
    }
}

/// Shorthand for [`AtomParams::new`].
pub fn make_params(mass_ratio: f64) -> Result<AtomParams> {
    AtomParams::new(mass_ratio)
}

/// Parameters of the circular Rydberg packet and of the center-of-mass Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub n_bar: f64,
    pub sigma_n: f64,
    /// Inclusive range of principal quantum numbers carried by the packet.
    pub window: (u32, u32),
    /// Width of the center-of-mass Gaussian, in bohr.
    pub sigma_com: f64,
}

impl PacketSpec {
    pub const DEFAULT_N_BAR: f64 = 60.0;
    pub const DEFAULT_SIGMA_N: f64 = 0.8;
    pub const DEFAULT_SIGMA_COM: f64 = 10.0;

    /// Spec with the default ±8σ window, validated.
    pub fn new(n_bar: f64, sigma_n: f64, sigma_com: f64) -> Result<Self> {
        let spec = Self { n_bar, sigma_n, window: default_window(n_bar, sigma_n)?, sigma_com };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_window(mut self, lo: u32, hi: u32) -> Result<Self> {
        self.window = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_bar.is_finite() || self.n_bar < 1.0 {
            return Err(invalid("n_bar", format!("must be >= 1, got {}", self.n_bar)));
        }
        if !self.sigma_n.is_finite() || self.sigma_n <= 0.0 {
            return Err(invalid("sigma_n", format!("must be > 0, got {}", self.sigma_n)));
        }
        if !self.sigma_com.is_finite() || self.sigma_com <= 0.0 {
            return Err(invalid("sigma_com", format!("must be > 0, got {}", self.sigma_com)));
        }
        let (lo, hi) = self.window;
        if lo < 1 {
            return Err(invalid("window", "lower bound must be >= 1"));
        }
        if f64::from(lo) > self.n_bar || f64::from(hi) < self.n_bar {
            return Err(invalid("window", format!("[{lo}, {hi}] does not contain n_bar={}", self.n_bar)));
        }
        Ok(())
    }
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self::new(Self::DEFAULT_N_BAR, Self::DEFAULT_SIGMA_N, Self::DEFAULT_SIGMA_COM)
            .expect("default packet spec is valid")
    }
}

/// `[max(1, ceil(n̄ - 8σ)), floor(n̄ + 8σ)]`.
pub fn default_window(n_bar: f64, sigma_n: f64) -> Result<(u32, u32)> {
    if !n_bar.is_finite() || n_bar < 1.0 {
        return Err(invalid("n_bar", format!("must be >= 1, got {n_bar}")));
    }
    if !sigma_n.is_finite() || sigma_n <= 0.0 {
        return Err(invalid("sigma_n", format!("must be > 0, got {sigma_n}")));
    }
    let lo = (n_bar - 8.0 * sigma_n).ceil().max(1.0);
    let hi = (n_bar + 8.0 * sigma_n).floor();
    Ok((lo as u32, hi as u32))
}

/// Text form of a float that may be non-finite: `inf`, `-inf`, `nan`.
pub fn format_extended(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

/// Serde adapter writing finite floats as numbers and the rest as strings,
/// since JSON has no infinities.
pub mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::format_extended(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn physical_ratio_gives_1837_fuzziness() {
        let p = make_params(PROTON_ELECTRON_MASS_RATIO).unwrap();
        assert!((p.total_mass() / p.electron_mass() - 1837.1527).abs() < 1e-4);
    }

    #[test]
    fn symmetric_and_toy_ratios() {
        let p = make_params(1.0).unwrap();
        assert_eq!(p.reduced_mass(), 0.5);
        assert_eq!(p.total_mass(), 2.0);
        let p = make_params(100.0).unwrap();
        assert!((p.reduced_mass() - 100.0 / 101.0).abs() < 1e-15);
        assert!((p.reduced_mass() - 0.990099).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_ratios() {
        for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(make_params(r).is_err(), "{r}");
        }
    }

    #[test]
    fn default_window_and_validation() {
        let s = PacketSpec::default();
        assert_eq!(s.window, (54, 66));
        assert!(PacketSpec::new(0.0, 0.8, 10.0).is_err());
        assert!(PacketSpec::new(10.0, 0.0, 10.0).is_err());
        assert!(PacketSpec::new(10.0, 1.0, -1.0).is_err());
        assert!(s.with_window(61, 70).is_err());
        assert_eq!(PacketSpec::new(10.0, 1e-9, 1.0).unwrap().window, (10, 10));
    }

    proptest! {
        #[test]
        fn mass_identities_hold(ratio in 1e-3f64..1e5) {
            let p = make_params(ratio).unwrap();
            prop_assert_eq!(p.electron_mass() + p.proton_mass(), p.total_mass());
            let mu = p.electron_mass() * p.proton_mass() / (p.electron_mass() + p.proton_mass());
            prop_assert_eq!(mu - p.reduced_mass(), 0.0);
        }

        #[test]
        fn si_round_trip(x in -1e6f64..1e6) {
            for d in [Dimension::Length, Dimension::Time, Dimension::Energy, Dimension::Mass, Dimension::Momentum] {
                let back = d.from_si(d.to_si(x));
                prop_assert!((back - x).abs() <= 1e-14 * x.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
}
