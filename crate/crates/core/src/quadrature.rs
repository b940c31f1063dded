//! Gauss rules used by the matrix-element and normalization checks.

use gauss_quad::laguerre::GaussLaguerre;
use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights mapped onto `[a, b]`.
pub fn legendre_on(degree: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(degree.try_into().expect("degree > 0"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Composite Gauss–Legendre on `[a, b]` split into `panels` equal pieces.
pub fn composite_legendre(degree: usize, panels: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(|k| legendre_on(degree, a + k as f64 * h, a + (k + 1) as f64 * h)).collect()
}

/// Generalized Gauss–Laguerre rule for `∫_0^∞ x^alpha e^{-x} f(x) dx`.
pub fn laguerre(degree: usize, alpha: f64) -> Vec<(f64, f64)> {
    let rule = GaussLaguerre::new(degree.try_into().expect("degree > 0"), alpha.try_into().expect("alpha > -1"));
    rule.iter().map(|(x, w)| (*x, *w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let q = legendre_on(8, 0.0, 2.0);
        let v: f64 = q.iter().map(|(x, w)| w * x.powi(5)).sum();
        assert!((v - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_gives_factorials() {
        let q = laguerre(10, 0.0);
        let v: f64 = q.iter().map(|(x, w)| w * x.powi(6)).sum();
        assert!((v - 720.0).abs() < 1e-9);
    }
}
