//! The one-dimensional soft-core Coulomb well and its bound states.
//!
//! Bound states are built by imaginary-time split-operator relaxation,
//! Gram–Schmidt against the lower states after every step, followed by a
//! block-Davidson polish with a kinetic preconditioner.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{Grid1d, Spectral1d};
use crate::C64;

/// `V(x) = -1 / sqrt(x² + s²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftCore {
    pub softening: f64,
}

impl SoftCore {
    pub fn new(softening: f64) -> Result<Self> {
        if !softening.is_finite() || softening <= 0.0 {
            return Err(invalid("softening", format!("must be > 0, got {softening}")));
        }
        Ok(Self { softening })
    }

    pub fn value(&self, x: f64) -> f64 {
        -1.0 / (x * x + self.softening * self.softening).sqrt()
    }

    /// `dV/dx`.
    pub fn derivative(&self, x: f64) -> f64 {
        let q = x * x + self.softening * self.softening;
        x / (q * q.sqrt())
    }

    pub fn sample(&self, grid: &Grid1d, center: f64) -> Vec<f64> {
        (0..grid.n).map(|i| self.value(grid.x(i) - center)).collect()
    }
}

impl Default for SoftCore {
    fn default() -> Self {
        Self { softening: 1.0 }
    }
}

/// `H ψ` with spectral kinetic energy and a sampled potential.
pub fn apply_hamiltonian(spec: &Spectral1d, potential: &[f64], mass: f64, psi: &[C64]) -> Vec<C64> {
    let mut t = psi.to_vec();
    spec.forward(&mut t);
    t.iter_mut().zip(spec.ks()).for_each(|(v, &k)| *v *= k * k / (2.0 * mass));
    spec.inverse(&mut t);
    t.iter_mut().zip(psi.iter().zip(potential)).for_each(|(h, (p, &v))| *h += p * v);
    t
}

/// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn energy(spec: &Spectral1d, potential: &[f64], mass: f64, psi: &[C64]) -> f64 {
    let h = apply_hamiltonian(spec, potential, mass, psi);
    let num: f64 = psi.iter().zip(&h).map(|(p, q)| (p.conj() * q).re).sum();
    let den: f64 = psi.iter().map(|p| p.norm_sqr()).sum();
    num / den
}

fn inner(a: &[C64], b: &[C64], dx: f64) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>() * dx
}

fn normalize(psi: &mut [C64], dx: f64) {
    let n = inner(psi, psi, dx).re.sqrt();
    psi.iter_mut().for_each(|v| *v /= n);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxOptions {
    /// Imaginary time steps, used in order; each runs to convergence.
    pub schedule: Vec<f64>,
    /// Stop a stage when the energy changes by less than this per step.
    pub tolerance: f64,
    pub max_steps_per_stage: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { schedule: vec![0.05, 0.01, 0.002], tolerance: 1e-10, max_steps_per_stage: 200_000 }
    }
}

/// Lowest bound states of a sampled potential on a periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStates {
    pub grid: Grid1d,
    pub mass: f64,
    pub energies: Vec<f64>,
    /// Unit-normalized, real up to a global phase, positive lobe first.
    pub states: Vec<Vec<C64>>,
}

impl BoundStates {
    pub fn count(&self) -> usize {
        self.states.len()
    }
}

/// Relax the `count` lowest states of `potential` with particle `mass`.
pub fn relax_bound_states(
    grid: Grid1d,
    potential: &[f64],
    mass: f64,
    count: usize,
    opts: &RelaxOptions,
) -> Result<BoundStates> {
    if potential.len() != grid.n {
        return Err(Error::Grid(format!("potential has {} samples, grid {}", potential.len(), grid.n)));
    }
    if count == 0 {
        return Err(invalid("count", "need at least one state"));
    }
    if !(mass > 0.0) {
        return Err(invalid("mass", format!("must be > 0, got {mass}")));
    }
    let spec = Spectral1d::new(grid);
    let dx = grid.dx;
    let width = 0.25 * grid.half_width();
    let mut states: Vec<Vec<C64>> = Vec::with_capacity(count);
    for level in 0..count {
        // Gaussian times x^level has the right parity and node count
        let mut psi: Vec<C64> = (0..grid.n)
            .map(|i| {
                let x = grid.x(i) / width;
                C64::new(x.powi(level as i32) * (-0.5 * x * x).exp(), 0.0)
            })
            .collect();
        project_out(&mut psi, &states, dx);
        normalize(&mut psi, dx);
        for &tau in &opts.schedule {
            let half_v: Vec<f64> = potential.iter().map(|&v| (-0.5 * tau * v).exp()).collect();
            let kin: Vec<C64> = spec.ks().iter().map(|&k| C64::new((-tau * k * k / (2.0 * mass)).exp(), 0.0)).collect();
            let mut e_old = energy(&spec, potential, mass, &psi);
            let mut converged = false;
            for _ in 0..opts.max_steps_per_stage {
                psi.iter_mut().zip(&half_v).for_each(|(p, &h)| *p *= h);
                spec.apply_diagonal_k(&mut psi, &kin);
                psi.iter_mut().zip(&half_v).for_each(|(p, &h)| *p *= h);
                project_out(&mut psi, &states, dx);
                normalize(&mut psi, dx);
                let e = energy(&spec, potential, mass, &psi);
                if (e - e_old).abs() < opts.tolerance {
                    converged = true;
                    break;
                }
                e_old = e;
            }
            if !converged {
                return Err(Error::NoConvergence { steps: opts.max_steps_per_stage, delta: opts.tolerance });
            }
        }
        states.push(psi);
    }
    let (energies, states) = rayleigh_ritz(&spec, potential, mass, states);
    Ok(BoundStates { grid, mass, energies, states })
}

fn project_out(psi: &mut [C64], lower: &[Vec<C64>], dx: f64) {
    for phi in lower {
        let c = inner(phi, psi, dx);
        psi.iter_mut().zip(phi).for_each(|(p, f)| *p -= c * f);
    }
}

/// Block Davidson polish around the relaxed states.
///
/// The per-step stopping rule leaves an energy error of order
/// `tolerance / (τ · gap)` and the split propagator biases the fixed point
/// by O(τ²). Each round adds kinetically preconditioned residuals
/// `(T - E + 1)^{-1} (H - E) ψ` to the space and re-diagonalizes, until
/// every residual norm is below `POLISH_RESIDUAL`.
fn rayleigh_ritz(
    spec: &Spectral1d,
    potential: &[f64],
    mass: f64,
    mut states: Vec<Vec<C64>>,
) -> (Vec<f64>, Vec<Vec<C64>>) {
    let dx = spec.grid.dx;
    let m = states.len();
    for _ in 0..POLISH_ROUNDS {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(2 * m);
        let mut worst: f64 = 0.0;
        let mut corrections = Vec::with_capacity(m);
        for v in &states {
            let e = energy(spec, potential, mass, v);
            let mut r = apply_hamiltonian(spec, potential, mass, v);
            r.iter_mut().zip(v).for_each(|(a, b)| *a -= e * b);
            worst = worst.max(inner(&r, &r, dx).re.sqrt());
            let pre: Vec<C64> =
                spec.ks().iter().map(|&k| C64::new(1.0 / (k * k / (2.0 * mass) - e + 1.0), 0.0)).collect();
            spec.apply_diagonal_k(&mut r, &pre);
            corrections.push(r);
        }
        if worst < POLISH_RESIDUAL {
            break;
        }
        for v in states.iter().chain(&corrections) {
            let mut w = v.clone();
            let before = inner(&w, &w, dx).re.sqrt();
            // twice is enough for numerical orthogonality
            project_out(&mut w, &basis, dx);
            project_out(&mut w, &basis, dx);
            if inner(&w, &w, dx).re.sqrt() > 1e-12 * before {
                normalize(&mut w, dx);
                basis.push(w);
            }
        }
        states = ritz_lowest(spec, potential, mass, &basis, m);
    }
    let energies = states.iter().map(|v| energy(spec, potential, mass, v)).collect();
    (energies, states)
}

const POLISH_ROUNDS: usize = 200;
const POLISH_RESIDUAL: f64 = 1e-11;

fn ritz_lowest(spec: &Spectral1d, potential: &[f64], mass: f64, basis: &[Vec<C64>], m: usize) -> Vec<Vec<C64>> {
    let dx = spec.grid.dx;
    let b = basis.len();
    let hs: Vec<Vec<C64>> = basis.iter().map(|s| apply_hamiltonian(spec, potential, mass, s)).collect();
    // relaxed states are real, so the projected matrix is real symmetric
    let h = DMatrix::from_fn(b, b, |i, j| 0.5 * (inner(&basis[i], &hs[j], dx).re + inner(&basis[j], &hs[i], dx).re));
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut rotated = Vec::with_capacity(m);
    for &col in order.iter().take(m) {
        let mut v = vec![C64::new(0.0, 0.0); spec.grid.n];
        for (i, s) in basis.iter().enumerate() {
            let c = eig.eigenvectors[(i, col)];
            v.iter_mut().zip(s).for_each(|(a, b)| *a += c * b);
        }
        normalize(&mut v, dx);
        fix_sign(&mut v);
        rotated.push(v);
    }
    rotated
}

/// Remove the global phase, make the first appreciable sample positive and
/// drop the rounding-level imaginary residue (the Hamiltonian is real).
fn fix_sign(v: &mut [C64]) {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-3 * peak).copied() {
        let phase = first / first.norm();
        let before: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        v.iter_mut().for_each(|z| *z = C64::new((*z / phase).re, 0.0));
        let after: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let scale = (before / after).sqrt();
        v.iter_mut().for_each(|z| *z *= scale);
    }
}
