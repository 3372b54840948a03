//! The Heisenberg group ℍ¹: group law, gauge and distance, Cayley transform onto the
//! CR sphere, and the fundamental solution m_β of −(Δ_ℍ + βD_s)/(1 − β).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{HwError, Result};
use crate::numerics::{gamma, log0, C64};

/// A point (x, y, s) of ℍ¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub s: f64,
}

impl HPoint {
    /// Builds a point from its coordinates.
    pub const fn new(x: f64, y: f64, s: f64) -> Self {
        Self { x, y, s }
    }

    /// The group identity.
    pub const fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Complex horizontal coordinate w = x + iy.
    pub fn w(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    /// Squared horizontal radius x² + y².
    pub fn r2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Group inverse (−x, −y, −s).
    pub fn inverse(&self) -> Self {
        Self::new(-self.x, -self.y, -self.s)
    }

    /// Parabolic dilation (λx, λy, λ²s).
    pub fn dilate(&self, lambda: f64) -> Self {
        Self::new(lambda * self.x, lambda * self.y, lambda * lambda * self.s)
    }

    /// The point z = s + i(x² + y²) of the upper half-plane carrying radial data.
    pub fn half_plane(&self) -> C64 {
        C64::new(self.s, self.r2())
    }
}

/// A point (ζ₁, ζ₂) of the unit sphere S³ ⊂ ℂ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub zeta1: C64,
    pub zeta2: C64,
}

impl SpherePoint {
    /// Builds a sphere point, checking the unit-norm invariant to 1e−12.
    pub fn new(zeta1: C64, zeta2: C64) -> Result<Self> {
        let n = zeta1.norm_sqr() + zeta2.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(HwError::InvalidInput(format!("|ζ|² = {n} is not 1")));
        }
        Ok(Self { zeta1, zeta2 })
    }
}

/// Group law (x+x′, y+y′, s+s′+2(x′y − xy′)).
pub fn group_mul(a: HPoint, b: HPoint) -> HPoint {
    HPoint::new(a.x + b.x, a.y + b.y, a.s + b.s + 2.0 * (b.x * a.y - a.x * b.y))
}

/// Homogeneous gauge ρ = ((x² + y²)² + s²)^{1/4}.
pub fn gauge(p: HPoint) -> f64 {
    let r2 = p.r2();
    (r2 * r2 + p.s * p.s).sqrt().sqrt()
}

/// Left-invariant gauge distance d(a, b) = ρ(b⁻¹a).
pub fn distance(a: HPoint, b: HPoint) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let r2 = dx * dx + dy * dy;
    let ds = a.s - b.s + 2.0 * (b.x * a.y - a.x * b.y);
    (r2 * r2 + ds * ds).sqrt().sqrt()
}

/// Cayley transform 𝒞(w, s) = (2w/(1+|w|²+is), (1−|w|²−is)/(1+|w|²+is)).
pub fn cayley(p: HPoint) -> SpherePoint {
    let w = p.w();
    let den = C64::new(1.0 + p.r2(), p.s);
    SpherePoint {
        zeta1: w * 2.0 / den,
        zeta2: C64::new(1.0 - p.r2(), -p.s) / den,
    }
}

/// Inverse Cayley transform (ζ₁/(1+ζ₂), Im((1−ζ₂)/(1+ζ₂))).
pub fn cayley_inv(q: SpherePoint) -> Result<HPoint> {
    let den = q.zeta2 + 1.0;
    if den.norm() < 1e-300 {
        return Err(HwError::PoleError("cayley_inv at the excluded point (0, −1)".into()));
    }
    let w = q.zeta1 / den;
    let s = ((C64::new(1.0, 0.0) - q.zeta2) / den).im;
    Ok(HPoint::new(w.re, w.im, s))
}

/// Jacobian 8/((1+|w|²)² + s²)² of the Cayley transform.
pub fn cayley_jacobian(p: HPoint) -> f64 {
    let a = 1.0 + p.r2();
    let d = a * a + p.s * p.s;
    8.0 / (d * d)
}

/// Constant −((1−β)/(2π²))Γ((1−β)/2)Γ((1+β)/2) of the fundamental solution.
pub fn m_beta_constant(beta: f64) -> Result<f64> {
    if !(beta > -1.0 && beta < 1.0) {
        return Err(HwError::DomainError(format!("β = {beta} outside (−1, 1)")));
    }
    Ok(-(1.0 - beta) / (2.0 * PI * PI) * gamma(0.5 * (1.0 - beta))? * gamma(0.5 * (1.0 + beta))?)
}

/// Fundamental solution m_β(x, y, s) = c_β (r² − is)^{−(1−β)/2} (r² + is)^{−(1+β)/2}.
///
/// For r² > 0 both bases have positive real part and the principal power is used;
/// on the s-axis the powers are taken through [`log0`].
pub fn m_beta(beta: f64, p: HPoint) -> Result<C64> {
    let c = m_beta_constant(beta)?;
    let r2 = p.r2();
    if r2 == 0.0 && p.s == 0.0 {
        return Err(HwError::SingularityError("m_β at the origin".into()));
    }
    let a = C64::new(r2, -p.s);
    let b = C64::new(r2, p.s);
    let (la, lb) = if r2 > 0.0 {
        (a.ln(), b.ln())
    } else {
        (log0(a)?, log0(b)?)
    };
    Ok((la * (-0.5 * (1.0 - beta)) + lb * (-0.5 * (1.0 + beta))).exp() * c)
}

/// The fundamental solution of −(Δ_ℍ + βD_s)/(1 − β) with D_s = −i∂ₛ, namely
/// −m_β(x, y, −s) = |c_β| (r² + is)^{−(1−β)/2} (r² − is)^{−(1+β)/2}.
///
/// Its σ > 0 lowest band dominates as β → 1, which forces the factor (r² − is)⁻¹ with a
/// positive constant; [`m_beta`] is its reflection s ↦ −s with the opposite sign.
pub fn fundamental_solution(beta: f64, p: HPoint) -> Result<C64> {
    Ok(-m_beta(beta, HPoint::new(p.x, p.y, -p.s))?)
}
