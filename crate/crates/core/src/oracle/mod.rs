//! Exact two-body dynamics in one dimension per particle.
//!
//! `i ∂ψ/∂t = [-∂²_{x_e}/(2m_e) - ∂²_{x_p}/(2m_p) + V(x_e - x_p)] ψ` with the
//! soft-core interaction, on a periodic 2-d grid indexed `[i * n_p + j]`
//! (`i` over `x_e`, `j` over `x_p`).

mod compare;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::reference::{ComMode, ComState};
use crate::softcore::{relax_bound_states, BoundStates, RelaxOptions, SoftCore};
use crate::spectral::{Grid1d, Spectral1d, Spectral2d};
use crate::{AtomParams, C64};

pub use compare::{
    compare_with_hybrid, hybrid_counterpart, ComparableRun, ComparisonReport, RunKind, VerdictRow, MOMENTUM_TOLERANCE,
    PROTON_MOTION_FLOOR,
};

/// Largest boundary-band fraction of the density a run tolerates.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;
/// The boundary band is `n / BOUNDARY_BAND_DIVISOR` points on each edge.
pub const BOUNDARY_BAND_DIVISOR: usize = 32;
/// Momentum-space tail weight defining the largest significant momentum.
pub const MOMENTUM_TAIL: f64 = 1e-10;

/// Initial relative-motion state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RelativeState {
    /// `Σ c_j χ_j(x)` over the lowest soft-core levels with the reduced mass.
    Bound { coeffs: Vec<C64> },
    /// `(2πw²)^{-1/4} exp(-(x - x0)²/(4w²) + i k x)`.
    Gaussian { center: f64, width: f64, momentum: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleScenario {
    pub mass_ratio: f64,
    pub softening: f64,
    /// Box half-widths for `x_e` and `x_p`.
    pub half_width: [f64; 2],
    pub points: [usize; 2],
    pub relative: RelativeState,
    /// Initial center-of-mass width σ0.
    pub sigma_com: f64,
    /// Center-of-mass momentum K.
    pub com_momentum: f64,
    pub total_time: f64,
    pub dt: f64,
    /// Observables are recorded every this many steps.
    pub sample_every: usize,
}

impl Default for OracleScenario {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            mass_ratio: 100.0,
            softening: 1.0,
            half_width: [40.0, 40.0],
            points: [512, 512],
            relative: RelativeState::Bound { coeffs: vec![C64::new(s, 0.0), C64::new(s, 0.0)] },
            sigma_com: 1.0,
            com_momentum: 0.0,
            total_time: 160.0,
            dt: 0.05,
            sample_every: 10,
        }
    }
}

impl OracleScenario {
    pub fn params(&self) -> Result<AtomParams> {
        AtomParams::new(self.mass_ratio)
    }

    pub fn grids(&self) -> Result<(Grid1d, Grid1d)> {
        Ok((
            Grid1d::centered(self.points[0], self.half_width[0])?,
            Grid1d::centered(self.points[1], self.half_width[1])?,
        ))
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).round() as usize
    }

    /// Parameter ranges and the softening-length resolution; the momentum
    /// margin is checked on the initial field by [`check_resolution`].
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        SoftCore::new(self.softening)?;
        let (gx, gy) = self.grids()?;
        for (name, g) in [("points", gx), ("points", gy)] {
            if g.n < 2 * BOUNDARY_BAND_DIVISOR {
                return Err(invalid(name, format!("need at least {} points per axis", 2 * BOUNDARY_BAND_DIVISOR)));
            }
            if g.dx > 0.25 * self.softening * (1.0 + 1e-12) {
                return Err(invalid(
                    "points",
                    format!("spacing {} exceeds softening/4 = {}", g.dx, 0.25 * self.softening),
                ));
            }
        }
        if !(self.sigma_com > 0.0) || !self.sigma_com.is_finite() {
            return Err(invalid("sigma_com", format!("must be > 0, got {}", self.sigma_com)));
        }
        if !self.com_momentum.is_finite() {
            return Err(invalid("com_momentum", "must be finite"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(invalid("total_time", format!("must be > 0, got {}", self.total_time)));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every", "must be >= 1"));
        }
        match &self.relative {
            RelativeState::Bound { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().all(|c| c.norm() == 0.0) {
                    return Err(invalid("relative.coeffs", "need at least one nonzero coefficient"));
                }
            }
            RelativeState::Gaussian { width, .. } => {
                if !(*width > 0.0) {
                    return Err(invalid("relative.width", format!("must be > 0, got {width}")));
                }
            }
        }
        Ok(())
    }
}

/// Lattice of all differences `x_e(i) - x_p(j)`; needs equal spacings.
pub fn relative_lattice(gx: &Grid1d, gy: &Grid1d) -> Result<Grid1d> {
    if (gx.dx - gy.dx).abs() > 1e-12 * gx.dx {
        return Err(Error::Grid(format!("relative lattice needs equal spacings, got {} and {}", gx.dx, gy.dx)));
    }
    Ok(Grid1d { n: gx.n + gy.n, x_min: gx.x_min - gy.x_min - (gy.n - 1) as f64 * gx.dx, dx: gx.dx })
}

/// Index of `x_e(i) - x_p(j)` on [`relative_lattice`].
fn lattice_index(i: usize, j: usize, ny: usize) -> usize {
    i + ny - 1 - j
}

#[derive(Debug, Clone)]
pub struct TwoBodyField {
    pub spectral: Spectral2d,
    pub psi: Vec<C64>,
    pub potential: SoftCore,
    pub params: AtomParams,
    pub t: f64,
}

/// Initial field with the relative states it was built from.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub field: TwoBodyField,
    pub com: ComState,
    pub relative_grid: Grid1d,
    /// Initial relative amplitude on `relative_grid`.
    pub relative: Vec<C64>,
    /// Relaxed reduced-mass levels for bound initial states.
    pub levels: Option<BoundStates>,
}

/// `ψ(x_e, x_p, 0) = φ(x_e - x_p) ψ_c((m_e x_e + m_p x_p)/M)`.
pub fn prepare(scenario: &OracleScenario) -> Result<Prepared> {
    scenario.validate()?;
    let params = scenario.params()?;
    let potential = SoftCore::new(scenario.softening)?;
    let (gx, gy) = scenario.grids()?;
    let lattice = relative_lattice(&gx, &gy)?;
    let (relative, levels) = match &scenario.relative {
        RelativeState::Bound { coeffs } => {
            let v = potential.sample(&lattice, 0.0);
            let levels =
                relax_bound_states(lattice, &v, params.reduced_mass(), coeffs.len(), &RelaxOptions::default())?;
            let mut phi = vec![C64::new(0.0, 0.0); lattice.n];
            for (c, s) in coeffs.iter().zip(&levels.states) {
                phi.iter_mut().zip(s).for_each(|(p, v)| *p += c * v);
            }
            let n = (phi.iter().map(|v| v.norm_sqr()).sum::<f64>() * lattice.dx).sqrt();
            phi.iter_mut().for_each(|v| *v /= n);
            (phi, Some(levels))
        }
        RelativeState::Gaussian { center, width, momentum } => {
            let a = (2.0 * std::f64::consts::PI * width * width).powf(-0.25);
            let phi = lattice
                .xs()
                .iter()
                .map(|&x| a * C64::new(-(x - center).powi(2) / (4.0 * width * width), momentum * x).exp())
                .collect();
            (phi, None)
        }
    };
    let com = ComState::new(scenario.sigma_com, &params, ComMode::FreeSpreading)?;
    let (m_e, m_p, m) = (params.electron_mass(), params.proton_mass(), params.total_mass());
    let (nx, ny) = (gx.n, gy.n);
    let mut psi = vec![C64::new(0.0, 0.0); nx * ny];
    psi.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
        let xe = gx.x(i);
        for (j, v) in row.iter_mut().enumerate() {
            let xp = gy.x(j);
            let big = (m_e * xe + m_p * xp) / m;
            *v = relative[lattice_index(i, j, ny)] * com.amplitude_1d(big, scenario.com_momentum, 0.0);
        }
    });
    let spectral = Spectral2d::new(gx, gy);
    let n = spectral.norm_sq(&psi).sqrt();
    psi.iter_mut().for_each(|v| *v /= n);
    let field = TwoBodyField { spectral, psi, potential, params, t: 0.0 };
    boundary_check(&field)?;
    check_resolution(&field)?;
    Ok(Prepared { field, com, relative_grid: lattice, relative, levels })
}

/// Smallest `k` with momentum-space weight beyond `|k|` below [`MOMENTUM_TAIL`].
fn significant_momentum(weights: &[(f64, f64)]) -> f64 {
    let mut w: Vec<(f64, f64)> = weights.iter().map(|&(k, p)| (k.abs(), p)).collect();
    w.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = w.iter().map(|p| p.1).sum();
    let mut tail = 0.0;
    for (k, p) in w {
        tail += p;
        if tail > MOMENTUM_TAIL * total {
            return k;
        }
    }
    0.0
}

/// Nyquist wavenumber of each axis must be at least twice the largest
/// significant momentum of the field.
pub fn check_resolution(field: &TwoBodyField) -> Result<()> {
    let s = &field.spectral;
    let mut hat = field.psi.clone();
    s.forward(&mut hat);
    let (nx, ny) = (s.gx.n, s.gy.n);
    let mut px = vec![0.0; nx];
    let mut py = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            let w = hat[i * ny + j].norm_sqr();
            px[i] += w;
            py[j] += w;
        }
    }
    let kx = significant_momentum(&s.kx().iter().copied().zip(px).collect::<Vec<_>>());
    let ky = significant_momentum(&s.ky().iter().copied().zip(py).collect::<Vec<_>>());
    for (axis, k, g) in [("x_e", kx, s.gx), ("x_p", ky, s.gy)] {
        if g.k_nyquist() < 2.0 * k {
            return Err(Error::Grid(format!(
                "{axis} Nyquist wavenumber {:.3} is below twice the largest momentum {k:.3}",
                g.k_nyquist()
            )));
        }
    }
    Ok(())
}

/// Fraction of the density within the edge bands of either axis.
pub fn boundary_density(field: &TwoBodyField) -> f64 {
    let s = &field.spectral;
    let (nx, ny) = (s.gx.n, s.gy.n);
    let (bx, by) = (nx / BOUNDARY_BAND_DIVISOR, ny / BOUNDARY_BAND_DIVISOR);
    let edge = |i: usize, n: usize, b: usize| i < b || i >= n - b;
    // per-row partials summed in order, so the result is reproducible
    let rows: Vec<f64> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let row = &field.psi[i * ny..(i + 1) * ny];
            if edge(i, nx, bx) {
                row.iter().map(|v| v.norm_sqr()).sum::<f64>()
            } else {
                row[..by].iter().chain(&row[ny - by..]).map(|v| v.norm_sqr()).sum::<f64>()
            }
        })
        .collect();
    rows.iter().sum::<f64>() * s.cell() / s.norm_sq(&field.psi)
}

fn boundary_check(field: &TwoBodyField) -> Result<()> {
    let b = boundary_density(field);
    if b > BOUNDARY_TOLERANCE {
        return Err(Error::BoundaryLeak { density: b, t: field.t });
    }
    Ok(())
}

/// Precomputed phases of the split step for one `dt`.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub dt: f64,
    half_potential: Vec<C64>,
    kinetic: Vec<C64>,
}

impl Propagator {
    pub fn new(field: &TwoBodyField, dt: f64) -> Result<Self> {
        Self::build(field, dt, true)
    }

    /// Kinetic phases only: two free particles.
    pub fn free(field: &TwoBodyField, dt: f64) -> Result<Self> {
        Self::build(field, dt, false)
    }

    fn build(field: &TwoBodyField, dt: f64, interacting: bool) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        let s = &field.spectral;
        let (gx, gy) = (s.gx, s.gy);
        let (m_e, m_p) = (field.params.electron_mass(), field.params.proton_mass());
        let ny = gy.n;
        let mut half_potential = vec![C64::new(0.0, 0.0); s.len()];
        half_potential.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if interacting {
                    C64::from_polar(1.0, -0.5 * dt * field.potential.value(gx.x(i) - gy.x(j)))
                } else {
                    C64::new(1.0, 0.0)
                };
            }
        });
        let mut kinetic = vec![C64::new(0.0, 0.0); s.len()];
        let (kx, ky) = (s.kx().to_vec(), s.ky().to_vec());
        kinetic.par_chunks_mut(ny).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                let e = kx[i] * kx[i] / (2.0 * m_e) + ky[j] * ky[j] / (2.0 * m_p);
                *v = C64::from_polar(1.0, -e * dt);
            }
        });
        Ok(Self { dt, half_potential, kinetic })
    }

    /// Half potential phase, full kinetic phase, half potential phase;
    /// aborts if density reaches the boundary bands.
    pub fn step(&self, field: &mut TwoBodyField) -> Result<()> {
        let mul = |psi: &mut [C64], ph: &[C64]| psi.par_iter_mut().zip(ph.par_iter()).for_each(|(v, p)| *v *= p);
        mul(&mut field.psi, &self.half_potential);
        field.spectral.apply_diagonal_k(&mut field.psi, &self.kinetic);
        mul(&mut field.psi, &self.half_potential);
        field.t += self.dt;
        boundary_check(field)
    }
}

/// One split step of length `dt`.
pub fn propagate_twobody(field: &TwoBodyField, dt: f64) -> Result<TwoBodyField> {
    let mut next = field.clone();
    Propagator::new(field, dt)?.step(&mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub electron: Vec<f64>,
    pub proton: Vec<f64>,
    pub x_e: f64,
    pub x_p: f64,
}

pub fn marginals(field: &TwoBodyField) -> Marginals {
    let s = &field.spectral;
    let (gx, gy) = (s.gx, s.gy);
    let (nx, ny) = (gx.n, gy.n);
    let electron: Vec<f64> =
        (0..nx).map(|i| field.psi[i * ny..(i + 1) * ny].iter().map(|v| v.norm_sqr()).sum::<f64>() * gy.dx).collect();
    let mut proton = vec![0.0; ny];
    for i in 0..nx {
        for (j, p) in proton.iter_mut().enumerate() {
            *p += field.psi[i * ny + j].norm_sqr();
        }
    }
    proton.iter_mut().for_each(|p| *p *= gx.dx);
    let x_e = electron.iter().enumerate().map(|(i, w)| w * gx.x(i)).sum::<f64>() * gx.dx;
    let x_p = proton.iter().enumerate().map(|(j, w)| w * gy.x(j)).sum::<f64>() * gy.dx;
    Marginals { electron, proton, x_e, x_p }
}

/// Density of `x = x_e - x_p` on [`relative_lattice`].
pub fn relative_marginal(field: &TwoBodyField) -> Result<(Grid1d, Vec<f64>)> {
    let s = &field.spectral;
    let lattice = relative_lattice(&s.gx, &s.gy)?;
    let ny = s.gy.n;
    let mut rho = vec![0.0; lattice.n];
    for (idx, v) in field.psi.iter().enumerate() {
        rho[lattice_index(idx / ny, idx % ny, ny)] += v.norm_sqr();
    }
    rho.iter_mut().for_each(|r| *r *= s.gx.dx);
    Ok((lattice, rho))
}

/// Spectral `(⟨p̂_e⟩, ⟨p̂_p⟩, ⟨T⟩)` from one transform.
pub fn spectral_moments(field: &TwoBodyField) -> (f64, f64, f64) {
    let s = &field.spectral;
    let mut hat = field.psi.clone();
    s.forward(&mut hat);
    let (m_e, m_p) = (field.params.electron_mass(), field.params.proton_mass());
    let (kx, ky) = (s.kx(), s.ky());
    let ny = s.gy.n;
    let (mut w, mut pe, mut pp, mut t) = (0.0, 0.0, 0.0, 0.0);
    for (idx, v) in hat.iter().enumerate() {
        let (a, b) = (kx[idx / ny], ky[idx % ny]);
        let q = v.norm_sqr();
        w += q;
        pe += q * a;
        pp += q * b;
        t += q * (a * a / (2.0 * m_e) + b * b / (2.0 * m_p));
    }
    (pe / w, pp / w, t / w)
}

/// `⟨P̂⟩ = ⟨p̂_e⟩ + ⟨p̂_p⟩`.
pub fn twobody_momentum(field: &TwoBodyField) -> f64 {
    let (pe, pp, _) = spectral_moments(field);
    pe + pp
}

pub fn twobody_energy(field: &TwoBodyField) -> f64 {
    let (_, _, t) = spectral_moments(field);
    let s = &field.spectral;
    let (gx, gy) = (s.gx, s.gy);
    let ny = gy.n;
    let rows: Vec<f64> = field
        .psi
        .par_chunks(ny)
        .enumerate()
        .map(|(i, row)| {
            row.iter().enumerate().map(|(j, p)| p.norm_sqr() * field.potential.value(gx.x(i) - gy.x(j))).sum::<f64>()
        })
        .collect();
    let v = rows.iter().sum::<f64>() * s.cell();
    t + v / s.norm_sq(&field.psi)
}

/// `Tr ρ_p²` with `ρ_p(y, y') = Σ_i ψ(x_i, y) ψ*(x_i, y') dx_e`.
pub fn proton_purity(field: &TwoBodyField) -> f64 {
    let s = &field.spectral;
    let (nx, ny) = (s.gx.n, s.gy.n);
    let norm = s.norm_sq(&field.psi);
    let m = DMatrix::from_row_slice(nx, ny, &field.psi);
    let rho = m.transpose() * m.map(|v| v.conj()) * C64::new(s.gx.dx / norm, 0.0);
    rho.iter().map(|v| v.norm_sqr()).sum::<f64>() * s.gy.dx * s.gy.dx
}

/// Sampled observables of an oracle run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub t: Vec<f64>,
    pub x_e: Vec<f64>,
    pub x_p: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_p: Vec<f64>,
    pub total_momentum: Vec<f64>,
    pub energy: Vec<f64>,
    pub norm: Vec<f64>,
    pub boundary: Vec<f64>,
    /// Electron marginal on the `x_e` axis at each sample.
    pub electron_density: Vec<Vec<f64>>,
    pub proton_density: Vec<Vec<f64>>,
}

impl OracleRecord {
    fn push(&mut self, field: &TwoBodyField) {
        let m = marginals(field);
        let (pe, pp, _) = spectral_moments(field);
        self.t.push(field.t);
        self.x_e.push(m.x_e);
        self.x_p.push(m.x_p);
        self.p_e.push(pe);
        self.p_p.push(pp);
        self.total_momentum.push(pe + pp);
        self.energy.push(twobody_energy(field));
        self.norm.push(field.spectral.norm_sq(&field.psi));
        self.boundary.push(boundary_density(field));
        self.electron_density.push(m.electron);
        self.proton_density.push(m.proton);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn momentum_drift(&self) -> f64 {
        max_dev(&self.total_momentum)
    }

    pub fn norm_drift(&self) -> f64 {
        max_dev(&self.norm)
    }

    pub fn relative_energy_drift(&self) -> f64 {
        max_dev(&self.energy) / self.energy[0].abs()
    }

    /// `max_t |m_e ⟨x_e⟩ + m_p ⟨x_p⟩ - M (⟨X⟩(0) + P t / M)|`.
    pub fn center_of_mass_deviation(&self, params: &AtomParams) -> f64 {
        let (m_e, m_p) = (params.electron_mass(), params.proton_mass());
        let p0 = self.total_momentum[0];
        let c0 = m_e * self.x_e[0] + m_p * self.x_p[0];
        (0..self.len())
            .map(|k| (m_e * self.x_e[k] + m_p * self.x_p[k] - c0 - p0 * (self.t[k] - self.t[0])).abs())
            .fold(0.0, f64::max)
    }

    /// Half the peak-to-peak excursion of a series.
    pub fn swing(series: &[f64]) -> f64 {
        let (lo, hi) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        0.5 * (hi - lo)
    }

    pub fn relative_center(&self) -> Vec<f64> {
        self.x_e.iter().zip(&self.x_p).map(|(e, p)| e - p).collect()
    }
}

fn max_dev(series: &[f64]) -> f64 {
    series.iter().map(|v| (v - series[0]).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub scenario: OracleScenario,
    pub prepared: Prepared,
    pub record: OracleRecord,
    pub final_field: TwoBodyField,
}

/// Propagate the scenario, sampling every `sample_every` steps and at the end.
pub fn run_oracle(scenario: &OracleScenario) -> Result<OracleRun> {
    let prepared = prepare(scenario)?;
    let mut field = prepared.field.clone();
    let prop = Propagator::new(&field, scenario.dt)?;
    let mut record = OracleRecord {
        t: Vec::new(),
        x_e: Vec::new(),
        x_p: Vec::new(),
        p_e: Vec::new(),
        p_p: Vec::new(),
        total_momentum: Vec::new(),
        energy: Vec::new(),
        norm: Vec::new(),
        boundary: Vec::new(),
        electron_density: Vec::new(),
        proton_density: Vec::new(),
    };
    record.push(&field);
    let steps = scenario.steps();
    for k in 1..=steps {
        prop.step(&mut field)?;
        field.t = k as f64 * scenario.dt;
        if k % scenario.sample_every == 0 || k == steps {
            record.push(&field);
        }
    }
    Ok(OracleRun { scenario: scenario.clone(), prepared, record, final_field: field })
}

/// Propagate the relative amplitude alone (reduced mass, same split).
pub fn propagate_relative(prepared: &Prepared, dt: f64, steps: usize) -> Vec<C64> {
    let g = prepared.relative_grid;
    let spec = Spectral1d::new(g);
    let params = &prepared.field.params;
    let mu = params.reduced_mass();
    let half: Vec<C64> =
        g.xs().iter().map(|&x| C64::from_polar(1.0, -0.5 * dt * prepared.field.potential.value(x))).collect();
    let kin: Vec<C64> = spec.ks().iter().map(|&k| C64::from_polar(1.0, -k * k / (2.0 * mu) * dt)).collect();
    let mut phi = prepared.relative.clone();
    for _ in 0..steps {
        phi.iter_mut().zip(&half).for_each(|(v, p)| *v *= p);
        spec.apply_diagonal_k(&mut phi, &kin);
        phi.iter_mut().zip(&half).for_each(|(v, p)| *v *= p);
    }
    phi
}

/// Largest pointwise gap between a 2-d field and the recombined product of
/// the separately evolved relative amplitude and the free center-of-mass
/// Gaussian at the field's time.
pub fn separability_error(prepared: &Prepared, field: &TwoBodyField, relative: &[C64], com_momentum: f64) -> f64 {
    let s = &field.spectral;
    let (gx, gy) = (s.gx, s.gy);
    let ny = gy.n;
    let p = &field.params;
    let (m_e, m_p, m) = (p.electron_mass(), p.proton_mass(), p.total_mass());
    field
        .psi
        .par_chunks(ny)
        .enumerate()
        .map(|(i, row)| {
            let xe = gx.x(i);
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let big = (m_e * xe + m_p * gy.x(j)) / m;
                    let w = relative[lattice_index(i, j, ny)] * prepared.com.amplitude_1d(big, com_momentum, field.t);
                    (v - w).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `ρ_p(x_p) = Σ_m |φ(x_m)|² |ψ_c(x_p + (m_e/M) x_m, t)|² dx`: the proton
/// density as the relative density smeared by the center-of-mass density.
pub fn proton_marginal_by_convolution(prepared: &Prepared, relative: &[C64], t: f64, com_momentum: f64) -> Vec<f64> {
    let g = prepared.relative_grid;
    let gy = prepared.field.spectral.gy;
    let p = &prepared.field.params;
    let lever = p.electron_mass() / p.total_mass();
    (0..gy.n)
        .into_par_iter()
        .map(|j| {
            let xp = gy.x(j);
            relative
                .iter()
                .enumerate()
                .map(|(m, phi)| {
                    phi.norm_sqr() * prepared.com.amplitude_1d(xp + lever * g.x(m), com_momentum, t).norm_sqr()
                })
                .sum::<f64>()
                * g.dx
        })
        .collect()
}
