//! Numerical laboratory for the hydrogen atom treated two ways: as an exact
//! two-body quantum system and as a mean-field hybrid in which the proton is
//! a classical particle.
//!
//! Everything is expressed in Hartree atomic units (ħ = m_e = a_B = e = 1).
//!
//! * [`units`] — masses, unit conversions and scenario parameters.
//! * [`basis`] — hydrogen eigenfunctions, with closed forms for circular states.
//! * [`reference`] — the full quantum description of a circular Rydberg packet.
//! * [`hybrid`] — mean-field hybrid dynamics under the adiabatic and Ehrenfest force laws.
//! * [`oracle`] — an exact 1-d two-body solver used as ground truth.

pub mod basis;
pub mod error;
pub mod hybrid;
pub mod oracle;
pub mod quadrature;
pub mod reference;
pub mod softcore;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use units::{AtomParams, PacketSpec};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type C64 = num_complex::Complex64;
