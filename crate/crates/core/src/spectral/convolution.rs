//! σ-space convolution and the V₀⁺ projection of cubic products.
//!
//! For V₀⁺ fields with profiles f₁, f₂, f₃ the profile of Π₀⁺(h₁h₂h̄₃) is
//! p(τ) = (τ/2π²) ∫_τ^∞ (f₁∗f₂)(σ) conj f₃(σ−τ) dσ/σ, and ‖u‖⁴_{L⁴} = (1/2π²)∫|f∗f|² dσ/(2σ).

use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::{SigmaGrid, Stencil};
use super::profile::SigmaProfile;
use crate::error::{HwError, Result};
use crate::numerics::{gauss_legendre, C64};

const PANEL_WIDTH: f64 = 0.5;
const PANEL_ORDER: usize = 6;

#[derive(Debug, Clone)]
struct Point {
    weight: f64,
    a: Stencil,
    b: Stencil,
}

fn panels(len: f64, x: &[f64], w: &[f64], mut visit: impl FnMut(f64, f64)) {
    if len <= 0.0 {
        return;
    }
    let n = (len / PANEL_WIDTH).ceil().max(1.0) as usize;
    let h = len / n as f64;
    for p in 0..n {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(w) {
            visit(a + 0.5 * h * (xi + 1.0), 0.5 * h * wi);
        }
    }
}

/// Precomputed quadrature for convolutions and cubic projections on one grid.
#[derive(Debug, Clone)]
pub struct ConvolutionPlan {
    grid: Arc<SigmaGrid>,
    conv: Vec<Vec<Point>>,
    proj: Vec<Vec<Point>>,
}

impl ConvolutionPlan {
    /// Builds the plan for `grid`.
    pub fn new(grid: Arc<SigmaGrid>) -> Self {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        let max = grid.max();
        let mut conv = Vec::with_capacity(grid.len());
        let mut proj = Vec::with_capacity(grid.len());
        for &sigma in grid.nodes() {
            let mut row = Vec::new();
            panels(0.5 * sigma, &x, &w, |tau, wt| {
                if let (Some(a), Some(b)) = (grid.stencil(sigma - tau), grid.stencil(tau)) {
                    row.push(Point { weight: wt, a, b });
                }
            });
            conv.push(row);
            let mut row = Vec::new();
            let c = sigma / (2.0 * PI * PI);
            panels(max - sigma, &x, &w, |t, wt| {
                if let (Some(a), Some(b)) = (grid.stencil(sigma + t), grid.stencil(t)) {
                    row.push(Point {
                        weight: c * wt / (sigma + t),
                        a,
                        b,
                    });
                }
            });
            proj.push(row);
        }
        Self { grid, conv, proj }
    }

    /// The grid.
    pub fn grid(&self) -> &Arc<SigmaGrid> {
        &self.grid
    }

    /// (f₁∗f₂)(σ_i) = ∫₀^{σ_i} f₁(σ_i−τ) f₂(τ) dτ at every node.
    pub fn convolve(&self, f1: &[C64], f2: &[C64]) -> Vec<C64> {
        self.conv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.weight * (p.a.apply(f1) * p.b.apply(f2) + p.a.apply(f2) * p.b.apply(f1)))
                    .sum()
            })
            .collect()
    }

    /// v_a = Σ_i c_i ∂(f∗f)_i/∂f_a, the transpose of the linearized self-convolution.
    pub fn self_convolution_adjoint(&self, f: &[C64], c: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for (row, ci) in self.conv.iter().zip(c) {
            for p in row {
                let fa = p.a.apply(f);
                let fb = p.b.apply(f);
                let k = 2.0 * p.weight * ci;
                p.a.scatter(k * fb, &mut out);
                p.b.scatter(k * fa, &mut out);
            }
        }
        out
    }

    /// Profile of Π₀⁺ of the product with convolution factor `g` = f₁∗f₂ and conjugated factor f₃.
    pub fn project(&self, g: &[C64], f3: &[C64]) -> Vec<C64> {
        self.proj
            .iter()
            .map(|row| row.iter().map(|p| p.weight * p.a.apply(g) * p.b.apply(f3).conj()).sum())
            .collect()
    }

    /// Profile of Π₀⁺(h₁h₂h̄₃).
    pub fn cubic(&self, f1: &[C64], f2: &[C64], f3: &[C64]) -> Vec<C64> {
        self.project(&self.convolve(f1, f2), f3)
    }

    /// ‖u‖⁴_{L⁴} = (1/2π²) ∫ |f∗f|² dσ/(2σ) for sampled f.
    pub fn l4_fourth(&self, f: &[C64]) -> f64 {
        let g = self.convolve(f, f);
        self.l4_fourth_from_convolution(&g)
    }

    /// ‖u‖⁴_{L⁴} from precomputed samples of f∗f.
    pub fn l4_fourth_from_convolution(&self, g: &[C64]) -> f64 {
        let s: f64 = self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(g)
            .map(|((x, w), v)| w * v.norm_sqr() / (2.0 * x))
            .sum();
        s / (2.0 * PI * PI)
    }
}

/// ‖u‖_{L⁴} of the V₀⁺ field with profile f, with the self-convolution taken on the σ-grid.
pub fn l4_norm_v0(f: &SigmaProfile) -> Result<f64> {
    let plan = ConvolutionPlan::new(f.grid().clone());
    let v = plan.l4_fourth(f.values());
    if !v.is_finite() {
        return Err(HwError::NonFinite { what: "L⁴ norm" });
    }
    Ok(v.powf(0.25))
}
