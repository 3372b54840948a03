//! Radial fields as sums of bands: a Laguerre index k, a sign of the central frequency σ,
//! and a profile in |σ|.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::profile::{laguerre_values, SigmaProfile};
use crate::error::{HwError, Result};
use crate::numerics::{QuadratureSpec, C64};

/// Sign of the central frequency σ carried by a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// σ > 0.
    Plus,
    /// σ < 0.
    Minus,
}

impl Sign {
    /// +1 or −1.
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One band: index k, sign, and profile f(|σ|).
#[derive(Debug, Clone)]
pub struct Band {
    /// Laguerre index k ≥ 0.
    pub k: usize,
    /// Sign of σ.
    pub sign: Sign,
    /// Profile in |σ|.
    pub profile: SigmaProfile,
}

impl Band {
    /// Eigenvalue factor 2k + 1 of the sub-Laplacian symbol (2k + 1)|σ|.
    pub fn level(&self) -> f64 {
        (2 * self.k + 1) as f64
    }

    /// Real-space contribution (1/√2π) ∫₀^∞ e^{±isσ} f(σ) φ_k(r², σ) dσ.
    pub fn value_at(&self, r2: f64, s: f64, spec: &QuadratureSpec) -> Result<C64> {
        let f = &self.profile;
        let eps = self.sign.as_f64();
        if let Some(form) = f.closed_form() {
            return Ok(match self.sign {
                Sign::Plus => form.band_plus(self.k, r2, s),
                Sign::Minus => form.conj().band_plus(self.k, r2, s).conj(),
            });
        }
        let k = self.k;
        let c = 1.0 / (2.0 * PI).sqrt();
        f.integral(
            |x, v| c * C64::from_polar(1.0, eps * s * x) * v * radial_band(k, x, r2),
            spec,
            "band value",
        )
    }
}

/// A radial field: a finite set of bands with distinct (k, sign).
#[derive(Debug, Clone, Default)]
pub struct BandField {
    bands: Vec<Band>,
}

impl BandField {
    /// Field from bands; duplicate (k, sign) pairs are rejected.
    pub fn new(mut bands: Vec<Band>) -> Result<Self> {
        bands.sort_by_key(|b| (b.sign, b.k));
        if bands.windows(2).any(|w| w[0].k == w[1].k && w[0].sign == w[1].sign) {
            return Err(HwError::InvalidInput("duplicate band in field".into()));
        }
        Ok(Self { bands })
    }

    /// Field supported on a single band.
    pub fn single(k: usize, sign: Sign, profile: SigmaProfile) -> Self {
        Self {
            bands: vec![Band { k, sign, profile }],
        }
    }

    /// The bands, ordered by sign then k.
    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Band (k, sign), if present.
    pub fn band(&self, k: usize, sign: Sign) -> Option<&Band> {
        self.bands.iter().find(|b| b.k == k && b.sign == sign)
    }

    /// u(r², s) = Σ over bands.
    pub fn value_at(&self, r2: f64, s: f64, spec: &QuadratureSpec) -> Result<C64> {
        self.bands.iter().map(|b| b.value_at(r2, s, spec)).sum()
    }
}

/// Which basis function [`basis_eval`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Normalized Hermite function h_m(x) on ℝ.
    Hermite(usize),
    /// Radial band function φ_k(r², σ) = π^{−1/2} L_k(2|σ|r²) e^{−|σ|r²}.
    RadialBand(usize),
}

/// Normalized Hermite function h_m(x), by the stable three-term recurrence.
pub fn hermite_function(m: usize, x: f64) -> f64 {
    let mut h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if m == 0 {
        return h0;
    }
    let mut h1 = 2f64.sqrt() * x * h0;
    for j in 1..m {
        let jf = j as f64;
        let h2 = (2.0 / (jf + 1.0)).sqrt() * x * h1 - (jf / (jf + 1.0)).sqrt() * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// φ_k(r², σ) = π^{−1/2} L_k(2|σ|r²) e^{−|σ|r²}.
pub fn radial_band(k: usize, sigma: f64, r2: f64) -> f64 {
    let a = sigma.abs();
    let mut l = Vec::with_capacity(k + 1);
    laguerre_values(k + 1, 2.0 * a * r2, &mut l);
    l[k] * (-a * r2).exp() / PI.sqrt()
}

/// Evaluates a basis function; `point` is x for Hermite functions and r² for radial bands.
///
/// The Hermite functions do not depend on σ.
pub fn basis_eval(kind: BasisKind, sigma: f64, point: f64) -> Result<f64> {
    if !sigma.is_finite() || !point.is_finite() {
        return Err(HwError::NonFinite { what: "basis argument" });
    }
    match kind {
        BasisKind::Hermite(m) => Ok(hermite_function(m, point)),
        BasisKind::RadialBand(k) => {
            if point < 0.0 {
                return Err(HwError::DomainError(format!("r² must be non-negative, got {point}")));
            }
            Ok(radial_band(k, sigma, point))
        }
    }
}

/// Homogeneous Sobolev norm ‖u‖_{Ḣᵏ} with ‖u‖² = Σ_b ∫ ((2k_b+1)σ)^k |f_b|² dσ/(2σ).
pub fn hk_norm(u: &BandField, k: i32, spec: &QuadratureSpec) -> Result<f64> {
    let mut total = 0.0;
    for b in u.bands() {
        let level = b.level();
        let part = if k == 1 {
            0.5 * level * b.profile.l2_sq(spec)?
        } else {
            b.profile
                .integral(
                    |s, v| C64::new((level * s).powi(k) * v.norm_sqr() / (2.0 * s), 0.0),
                    spec,
                    "Sobolev norm",
                )?
                .re
        };
        total += part;
    }
    if !total.is_finite() {
        return Err(HwError::NonFinite { what: "Sobolev norm" });
    }
    Ok(total.sqrt())
}

/// ⟨−(Δ_ℍ + β D_s) u, u⟩ expressed on bands: Σ_b ((2k_b+1) − β ε_b)/2 ∫ |f_b|² dσ.
pub fn quad_form_beta(u: &BandField, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut total = 0.0;
    for b in u.bands() {
        total += 0.5 * (b.level() - beta * b.sign.as_f64()) * b.profile.l2_sq(spec)?;
    }
    Ok(total)
}

/// Splits u into its (k=0, σ>0) profile and the remaining bands.
pub fn project_v0plus(u: &BandField) -> (Option<SigmaProfile>, BandField) {
    let mut rest = Vec::new();
    let mut v0 = None;
    for b in u.bands() {
        if b.k == 0 && b.sign == Sign::Plus {
            v0 = Some(b.profile.clone());
        } else {
            rest.push(b.clone());
        }
    }
    (v0, BandField { bands: rest })
}
