//! Full two-body quantum description: the separated relative packet,
//! the center-of-mass Gaussian, and what they imply for each particle.

mod com;
mod density;
mod packet;

pub use com::{particle_centers, ComMode, ComState};
pub use density::{
    coarse_grain, default_plane, electron_kernel_width, particle_density, proton_kernel_width, reduce_amplitude,
    reduced_wavefunction, sample_amplitude_plane, sample_density_plane, Particle, PlanarAmplitude, PlanarDensity,
    PlaneField, PlaneGeometry, MIN_EXTENT_ORBITS, PAD_KERNEL_WIDTHS,
};
pub use packet::{
    autocorrelation_peak, build_packet, evolve_coeffs, kepler_period, scan, spreading_time, time_scales,
    CircularPacket, TimeScales, LOW_CLIP_LIMIT, SCAN_RESOLUTION, SPREAD_THRESHOLD, WINDOW_TRUNCATION_LIMIT,
};
