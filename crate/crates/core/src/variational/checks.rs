//! Pointwise checks on traveling waves: the integral equation through the fundamental
//! solution m_β and the decay |Q|(ρ² + 1) = O(1).

use std::f64::consts::PI;

use serde::Serialize;

use super::qbeta::QBetaSolution;
use crate::error::{HwError, Result};
use crate::heisenberg::{fundamental_solution, group_mul, m_beta, HPoint};
use crate::numerics::{gauss_legendre_on, C64};

/// Quadrature sizes for the ℍ¹ convolution.
///
/// A kernel point w = (√R cos φ, √R sin φ, c) is parametrized by c + iR = ρe^{iψ}, so that
/// dλ₃(w) = ½ρ dρ dψ dφ and the factor ρ cancels the ρ⁻² singularity of m_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionGrid {
    /// Gauss–Legendre nodes on ρ ∈ (0, ρ₁).
    pub n_inner: usize,
    /// Gauss–Legendre nodes on the mapped tail ρ ∈ (ρ₁, ∞).
    pub n_tail: usize,
    /// Gauss–Legendre nodes in ψ ∈ (0, π).
    pub n_psi: usize,
    /// Trapezoid nodes in φ ∈ [0, 2π).
    pub n_phi: usize,
    /// Split radius ρ₁.
    pub split: f64,
}

impl ConvolutionGrid {
    /// Grid scaled by `factor` in every direction.
    pub fn refined(&self, factor: f64) -> Self {
        let up = |n: usize| ((n as f64) * factor).round().max(2.0) as usize;
        Self {
            n_inner: up(self.n_inner),
            n_tail: up(self.n_tail),
            n_psi: up(self.n_psi),
            n_phi: up(self.n_phi),
            split: self.split,
        }
    }
}

impl Default for ConvolutionGrid {
    fn default() -> Self {
        Self {
            n_inner: 24,
            n_tail: 12,
            n_psi: 16,
            n_phi: 16,
            split: 3.0,
        }
    }
}

/// Residuals of the integral equation on one quadrature grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionLevel {
    pub grid: ConvolutionGrid,
    /// |Q(p) − (N ⋆ m_β)(p)| / |Q(p)| for each point (0 where both vanish).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Output of [`convolution_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionReport {
    pub beta: f64,
    pub points: Vec<HPoint>,
    pub levels: Vec<ConvolutionLevel>,
    /// Maximal residual on the first grid when the kernel is [`m_beta`] instead of the
    /// fundamental solution.
    pub reflected_kernel_residual: f64,
}

impl ConvolutionReport {
    /// Largest residual on the finest grid.
    pub fn max_residual(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.max_residual)
    }

    /// True when every refinement lowered the maximal residual.
    pub fn decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].max_residual < w[0].max_residual)
    }
}

/// (N ⋆ m)(p) = ∫ N(p·w⁻¹) m(w) dλ₃(w) for a radial N given as a function of (r², s) and a
/// kernel m(x, y, s) depending on (x² + y², s) and homogeneous of degree −2.
pub fn convolve_kernel<F, K>(n: F, kernel: K, p: HPoint, grid: &ConvolutionGrid) -> Result<C64>
where
    F: Fn(f64, f64) -> C64,
    K: Fn(HPoint) -> Result<C64>,
{
    if grid.n_inner == 0 || grid.n_tail == 0 || grid.n_psi == 0 || grid.n_phi == 0 || !(grid.split > 0.0) {
        return Err(HwError::InvalidInput(format!("degenerate convolution grid {grid:?}")));
    }
    let (xi, wi) = gauss_legendre_on(grid.n_inner, 0.0, grid.split);
    let (xt, wt) = gauss_legendre_on(grid.n_tail, 0.0, 1.0);
    let mut rho: Vec<(f64, f64)> = xi.into_iter().zip(wi).collect();
    // ρ = ρ₁/(1 − t) on the tail.
    rho.extend(
        xt.into_iter()
            .zip(wt)
            .map(|(t, w)| (grid.split / (1.0 - t), w * grid.split / (1.0 - t).powi(2))),
    );
    let (psi, wpsi) = gauss_legendre_on(grid.n_psi, 0.0, PI);
    let dphi = 2.0 * PI / grid.n_phi as f64;
    let mut acc = C64::new(0.0, 0.0);
    for &(r, wr) in &rho {
        for (ps, wp) in psi.iter().zip(&wpsi) {
            let c = r * ps.cos();
            let big_r = r * ps.sin();
            let radius = big_r.sqrt();
            let mut ring = C64::new(0.0, 0.0);
            let k = kernel(HPoint::new(radius, 0.0, c))?;
            for l in 0..grid.n_phi {
                let phi = l as f64 * dphi;
                let w = HPoint::new(radius * phi.cos(), radius * phi.sin(), c);
                let q = group_mul(p, w.inverse());
                ring += n(q.r2(), q.s);
            }
            acc += ring * k * (0.5 * r * wr * wp * dphi);
        }
    }
    Ok(acc)
}

/// (N ⋆ m_β)(p) with m_β the fundamental solution of −(Δ_ℍ + βD_s)/(1 − β).
pub fn convolve_fundamental<F>(n: F, beta: f64, p: HPoint, grid: &ConvolutionGrid) -> Result<C64>
where
    F: Fn(f64, f64) -> C64,
{
    convolve_kernel(n, |w| fundamental_solution(beta, w), p, grid)
}

/// Compares Q_β with (|Q_β|²Q_β) ⋆ m_β at `points` on each grid of `levels`.
pub fn convolution_check<F>(q: F, beta: f64, points: &[HPoint], levels: &[ConvolutionGrid]) -> Result<ConvolutionReport>
where
    F: Fn(f64, f64) -> C64,
{
    let n = |r2: f64, s: f64| {
        let v = q(r2, s);
        v * v.norm_sqr()
    };
    let relative = |want: C64, got: C64| {
        let diff = (want - got).norm();
        if want.norm() > 0.0 {
            diff / want.norm()
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let mut out = Vec::with_capacity(levels.len());
    for grid in levels {
        let mut residuals = Vec::with_capacity(points.len());
        for p in points {
            residuals.push(relative(q(p.r2(), p.s), convolve_fundamental(n, beta, *p, grid)?));
        }
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        out.push(ConvolutionLevel {
            grid: *grid,
            residuals,
            max_residual,
        });
    }
    let mut reflected_kernel_residual = 0.0f64;
    if let Some(grid) = levels.first() {
        for p in points {
            let got = convolve_kernel(n, |w| m_beta(beta, w), *p, grid)?;
            reflected_kernel_residual = reflected_kernel_residual.max(relative(q(p.r2(), p.s), got));
        }
    }
    Ok(ConvolutionReport {
        beta,
        points: points.to_vec(),
        levels: out,
        reflected_kernel_residual,
    })
}

/// Convolution residuals of a sequence of solves of the same Q_β, each paired with its own
/// quadrature grid; `levels` should go from coarse to fine.
pub fn convolution_check_qbeta(
    levels: &[(&QBetaSolution, ConvolutionGrid)],
    points: &[HPoint],
) -> Result<ConvolutionReport> {
    let mut report: Option<ConvolutionReport> = None;
    for (sol, grid) in levels {
        let beta = sol
            .result
            .beta
            .ok_or_else(|| HwError::InvalidInput("solution carries no β".into()))?;
        let r = convolution_check(|r2, s| sol.basis.value_at(&sol.coeffs, r2, s), beta, points, &[*grid])?;
        match report.as_mut() {
            None => report = Some(r),
            Some(acc) => {
                if acc.beta != beta {
                    return Err(HwError::InvalidInput(format!(
                        "solves at β = {} and β = {beta}",
                        acc.beta
                    )));
                }
                acc.levels.extend(r.levels);
            }
        }
    }
    report.ok_or_else(|| HwError::InvalidInput("no convolution levels".into()))
}

/// Ten interior points at gauge distance at most about 1.5 from the origin.
pub fn interior_points() -> Vec<HPoint> {
    (0..10)
        .map(|i| {
            let t = i as f64 / 9.0;
            let r = 0.2 + 0.8 * t;
            let phi = 0.7 * i as f64;
            HPoint::new(r * phi.cos(), r * phi.sin(), -1.0 + 2.0 * t)
        })
        .collect()
}

/// Output of [`decay_check`].
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    /// sup of |Q|(ρ² + 1) over the grid.
    pub sup: f64,
    /// Maximum over ρ < ⅔ρ_max.
    pub inner_max: f64,
    /// Maximum over ρ ≥ ⅔ρ_max.
    pub outer_max: f64,
    /// outer_max ≤ 1.05 · inner_max.
    pub bounded: bool,
    pub rho_max: f64,
}

/// Samples |Q|(ρ² + 1) on s + ir² = ρ²e^{iψ}, with ρ = ρ_max·i/n_rho and ψ ∈ [0, π].
pub fn decay_check<F>(q: F, rho_max: f64, n_rho: usize, n_psi: usize) -> Result<DecayReport>
where
    F: Fn(f64, f64) -> C64,
{
    if n_rho < 3 || n_psi < 2 || !(rho_max > 0.0) {
        return Err(HwError::InvalidInput(
            "decay grid needs n_rho ≥ 3, n_psi ≥ 2, ρ_max > 0".into(),
        ));
    }
    let (mut inner, mut outer) = (0.0f64, 0.0f64);
    for i in 0..=n_rho {
        let rho = rho_max * i as f64 / n_rho as f64;
        let rho2 = rho * rho;
        for j in 0..=n_psi {
            let psi = PI * j as f64 / n_psi as f64;
            let v = q(rho2 * psi.sin().max(0.0), rho2 * psi.cos()).norm() * (rho2 + 1.0);
            if 3 * i < 2 * n_rho {
                inner = inner.max(v);
            } else {
                outer = outer.max(v);
            }
        }
    }
    Ok(DecayReport {
        sup: inner.max(outer),
        inner_max: inner,
        outer_max: outer,
        bounded: outer <= 1.05 * inner,
        rho_max,
    })
}

/// [`decay_check`] on a solved traveling wave over ρ² ≤ 64.
pub fn decay_check_qbeta(sol: &QBetaSolution) -> Result<DecayReport> {
    decay_check(|r2, s| sol.basis.value_at(&sol.coeffs, r2, s), 8.0, 96, 48)
}
