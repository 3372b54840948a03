//! Fixed tensor cubature on the upper half-plane in polar coordinates about −i.
//!
//! With z = −i + (2/r)e^{iθ}, θ ∈ (0, π), r ∈ (0, 2 sin θ), the half-plane is covered once
//! and dλ = 4 r⁻³ dr dθ. Fields built from (z + i)⁻¹ become polynomial in r, so Gauss–Legendre
//! rules in both variables are very accurate. The radial variable is graded as r = 2 sin θ·u^q,
//! which also absorbs the log r terms of Bergman projections at infinity.

use std::f64::consts::PI;

use crate::numerics::{gauss_legendre, C64};

/// Nodes and weights with ∫_{ℂ₊} g dλ ≈ Σ w_p g(z_p).
#[derive(Debug, Clone)]
pub struct UhpCubature {
    points: Vec<C64>,
    weights: Vec<f64>,
}

impl UhpCubature {
    /// Tensor rule with `n_theta` angular and `n_r` radial nodes and quadratic grading.
    pub fn new(n_theta: usize, n_r: usize) -> Self {
        Self::graded(n_theta, n_r, 2)
    }

    /// Tensor rule with radial grading exponent `q` ≥ 1.
    pub fn graded(n_theta: usize, n_r: usize, q: u32) -> Self {
        let q = q.max(1) as i32;
        let (xt, wt) = gauss_legendre(n_theta);
        let (xr, wr) = gauss_legendre(n_r);
        let mut points = Vec::with_capacity(n_theta * n_r);
        let mut weights = Vec::with_capacity(n_theta * n_r);
        for (x, w) in xt.iter().zip(&wt) {
            let theta = 0.5 * PI * (x + 1.0);
            let w_theta = 0.5 * PI * w;
            let top = 2.0 * theta.sin();
            for (y, v) in xr.iter().zip(&wr) {
                let u = 0.5 * (y + 1.0);
                let r = top * u.powi(q);
                let w_r = 0.5 * v * top * f64::from(q) * u.powi(q - 1);
                points.push(C64::new(0.0, -1.0) + C64::from_polar(2.0 / r, theta));
                weights.push(w_theta * w_r * 4.0 / (r * r * r));
            }
        }
        Self { points, weights }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the rule has no nodes.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nodes z_p in ℂ₊.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Weights w_p.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ w_p g(z_p).
    pub fn integrate<G: Fn(C64) -> C64>(&self, g: G) -> C64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| *w * g(*z)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_rational_examples() {
        let q = UhpCubature::new(40, 40);
        let v = q.integrate(|z| C64::new((z + C64::i()).norm().powi(-4), 0.0));
        assert!((v.re - PI / 4.0).abs() < 1e-13);
        let v = q.integrate(|z| {
            let a = z + C64::i();
            C64::new(a.norm().powi(-4) * (2.0 * C64::i() / a - 1.0).norm_sqr(), 0.0)
        });
        assert!((v.re - PI / 8.0).abs() < 1e-13);
        // |Q₊|⁴ integrates to π over the half-plane.
        let v = q.integrate(|z| C64::new((2f64.sqrt() / (z + C64::i()).norm()).powi(4), 0.0));
        assert!((v.re - PI).abs() < 1e-12);
        assert!(q.points().iter().all(|z| z.im > 0.0));
    }
}
