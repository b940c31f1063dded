//! Uniform periodic grids with FFT-based kinetic propagation and
//! spectral expectation values, in one and two dimensions.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::C64;

/// `n` points `x_min + i dx`, periodic with length `n dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1d {
    pub n: usize,
    pub x_min: f64,
    pub dx: f64,
}

impl Grid1d {
    /// Symmetric box `[-half_width, half_width)`.
    pub fn centered(n: usize, half_width: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("points", "need at least two grid points"));
        }
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(invalid("half_width", format!("must be > 0, got {half_width}")));
        }
        Ok(Self { n, x_min: -half_width, dx: 2.0 * half_width / n as f64 })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumber of FFT bin `j` (standard FFT ordering).
    pub fn k(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let j = j as i64;
        let signed = if j < (n + 1) / 2 { j } else { j - n };
        2.0 * PI * signed as f64 / (n as f64 * self.dx)
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.k(j)).collect()
    }

    pub fn k_nyquist(&self) -> f64 {
        PI / self.dx
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.n as f64 * self.dx
    }
}

/// FFT plans for one grid; cheap to clone.
#[derive(Clone)]
pub struct Spectral1d {
    pub grid: Grid1d,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    ks: Vec<f64>,
}

impl std::fmt::Debug for Spectral1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral1d").field("grid", &self.grid).finish()
    }
}

impl Spectral1d {
    pub fn new(grid: Grid1d) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
            ks: grid.ks(),
        }
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [C64]) {
        self.inverse.process(data);
        let s = 1.0 / self.grid.n as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    /// Multiply by `phases[j]` in momentum space.
    pub fn apply_diagonal_k(&self, psi: &mut [C64], phases: &[C64]) {
        self.forward(psi);
        psi.iter_mut().zip(phases).for_each(|(v, p)| *v *= p);
        self.inverse(psi);
    }

    pub fn norm_sq(&self, psi: &[C64]) -> f64 {
        psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// `Σ_j f(k_j) |ψ̂_j|² / Σ_j |ψ̂_j|²`.
    pub fn k_expectation(&self, psi: &[C64], f: impl Fn(f64) -> f64) -> f64 {
        let mut hat = psi.to_vec();
        self.forward(&mut hat);
        let (mut num, mut den) = (0.0, 0.0);
        for (v, &k) in hat.iter().zip(&self.ks) {
            let w = v.norm_sqr();
            num += f(k) * w;
            den += w;
        }
        num / den
    }

    pub fn mean_momentum(&self, psi: &[C64]) -> f64 {
        self.k_expectation(psi, |k| k)
    }

    pub fn kinetic_energy(&self, psi: &[C64], mass: f64) -> f64 {
        self.k_expectation(psi, |k| k * k / (2.0 * mass))
    }

    /// Spectral derivative `dψ/dx`.
    pub fn derivative(&self, psi: &[C64]) -> Vec<C64> {
        let mut hat = psi.to_vec();
        self.forward(&mut hat);
        hat.iter_mut().zip(&self.ks).for_each(|(v, &k)| *v *= C64::new(0.0, k));
        self.inverse(&mut hat);
        hat
    }

    /// Band-limited translation `ψ(x) → ψ(x - shift)`.
    pub fn translate(&self, psi: &[C64], shift: f64) -> Vec<C64> {
        let phases: Vec<C64> = self.ks.iter().map(|&k| C64::from_polar(1.0, -k * shift)).collect();
        let mut out = psi.to_vec();
        self.apply_diagonal_k(&mut out, &phases);
        out
    }
}

/// Row-major field `ψ[i * ny + j]` on the product of two 1-d grids.
#[derive(Clone)]
pub struct Spectral2d {
    pub gx: Grid1d,
    pub gy: Grid1d,
    fx: Spectral1d,
    fy: Spectral1d,
}

impl std::fmt::Debug for Spectral2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral2d").field("gx", &self.gx).field("gy", &self.gy).finish()
    }
}

impl Spectral2d {
    pub fn new(gx: Grid1d, gy: Grid1d) -> Self {
        Self { gx, gy, fx: Spectral1d::new(gx), fy: Spectral1d::new(gy) }
    }

    pub fn len(&self) -> usize {
        self.gx.n * self.gy.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self) -> f64 {
        self.gx.dx * self.gy.dx
    }

    pub fn kx(&self) -> &[f64] {
        self.fx.ks()
    }

    pub fn ky(&self) -> &[f64] {
        self.fy.ks()
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        let (nx, ny) = (self.gx.n, self.gy.n);
        data.par_chunks_mut(ny).for_each(|row| {
            if inverse {
                self.fy.inverse.process(row);
            } else {
                self.fy.forward.process(row);
            }
        });
        let mut t = transpose(data, nx, ny);
        t.par_chunks_mut(nx).for_each(|col| {
            if inverse {
                self.fx.inverse.process(col);
            } else {
                self.fx.forward.process(col);
            }
        });
        let back = transpose(&t, ny, nx);
        data.copy_from_slice(&back);
        if inverse {
            let s = 1.0 / (nx * ny) as f64;
            data.par_iter_mut().for_each(|v| *v *= s);
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, false);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, true);
    }

    pub fn apply_diagonal_k(&self, psi: &mut [C64], phases: &[C64]) {
        self.forward(psi);
        psi.par_iter_mut().zip(phases.par_iter()).for_each(|(v, p)| *v *= p);
        self.inverse(psi);
    }

    pub fn norm_sq(&self, psi: &[C64]) -> f64 {
        psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()
    }
}

fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(rows).enumerate().for_each(|(c, dst)| {
        for (r, v) in dst.iter_mut().enumerate() {
            *v = data[r * cols + c];
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_and_derivative() {
        let g = Grid1d::centered(64, 10.0).unwrap();
        let s = Spectral1d::new(g);
        assert!((g.k(1) - 2.0 * PI / 20.0).abs() < 1e-14);
        assert!(g.k(63) < 0.0);
        let psi: Vec<C64> = g.xs().iter().map(|&x| C64::new((-x * x).exp(), 0.0)).collect();
        let d = s.derivative(&psi);
        for (i, &x) in g.xs().iter().enumerate() {
            assert!((d[i].re + 2.0 * x * (-x * x).exp()).abs() < 1e-10);
        }
        let shifted = s.translate(&psi, 1.5);
        for (i, &x) in g.xs().iter().enumerate() {
            assert!((shifted[i].re - (-(x - 1.5) * (x - 1.5)).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn two_dimensional_round_trip() {
        let gx = Grid1d::centered(16, 3.0).unwrap();
        let gy = Grid1d::centered(8, 2.0).unwrap();
        let s = Spectral2d::new(gx, gy);
        let orig: Vec<C64> = (0..s.len()).map(|i| C64::new(i as f64 * 0.1, (i % 5) as f64)).collect();
        let mut d = orig.clone();
        s.forward(&mut d);
        s.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
