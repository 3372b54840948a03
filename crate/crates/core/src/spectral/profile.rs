//! Band profiles f(σ) on σ > 0, sampled on a grid and optionally carrying an exact closed form.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::SigmaGrid;
use crate::error::{HwError, Result};
use crate::numerics::{integrate_halfline, integrate_panels, QuadratureSpec, C64};

/// One term c σⁿ e^{−aσ} of an exponential polynomial, with Re a > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    /// Coefficient c.
    pub coeff: C64,
    /// Power n.
    pub power: u32,
    /// Rate a.
    pub rate: C64,
}

/// Profiles whose band transforms, norms and holomorphic transforms are known exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClosedForm {
    /// K e^{−ασ}.
    Exponential {
        /// Amplitude K.
        k: C64,
        /// Rate α > 0.
        alpha: f64,
    },
    /// Σ c σⁿ e^{−aσ}.
    ExpPoly {
        /// Terms of the sum.
        terms: Vec<ExpTerm>,
    },
    /// Σ_j c_j √(2α) e^{−(α+it)σ} L_j(2ασ), an orthonormal Laguerre expansion in L²(dσ).
    Laguerre {
        /// Scale α > 0.
        alpha: f64,
        /// Modulation t.
        shift: f64,
        /// Coefficients c_j.
        coeffs: Vec<C64>,
    },
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Laguerre polynomials L_0(x), …, L_{n−1}(x).
pub fn laguerre_values(n: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    if n == 0 {
        return;
    }
    out.push(1.0);
    if n > 1 {
        out.push(1.0 - x);
    }
    for j in 2..n {
        let jf = j as f64;
        let v = ((2.0 * jf - 1.0 - x) * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
        out.push(v);
    }
}

/// n-th derivative of (p − 2R)^k p^{−k−1} with respect to p.
fn band_kernel_derivative(k: u32, n: u32, p: C64, r2: f64) -> C64 {
    let q = p - 2.0 * r2;
    let mut total = C64::new(0.0, 0.0);
    for l in 0..=n.min(k) {
        let a = factorial(k) / factorial(k - l);
        let m = n - l;
        let rising: f64 = (0..m).map(|i| f64::from(k + 1 + i)).product();
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        total += binom(n, l) * a * sign * rising * q.powu(k - l) * p.powi(-((k + 1 + m) as i32));
    }
    total
}

impl ClosedForm {
    /// Validates parameters.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ClosedForm::Exponential { k, alpha } => *alpha > 0.0 && k.is_finite(),
            ClosedForm::ExpPoly { terms } => terms.iter().all(|t| t.rate.re > 0.0 && t.coeff.is_finite()),
            ClosedForm::Laguerre { alpha, shift, coeffs } => {
                *alpha > 0.0 && shift.is_finite() && coeffs.iter().all(|c| c.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(HwError::InvalidInput(format!("invalid closed form {self:?}")))
        }
    }

    /// Exponential-polynomial terms, when the form is of exponential type.
    pub fn exp_terms(&self) -> Option<Vec<ExpTerm>> {
        match self {
            ClosedForm::Exponential { k, alpha } => Some(vec![ExpTerm {
                coeff: *k,
                power: 0,
                rate: C64::new(*alpha, 0.0),
            }]),
            ClosedForm::ExpPoly { terms } => Some(terms.clone()),
            ClosedForm::Laguerre { .. } => None,
        }
    }

    /// Value f(σ).
    pub fn eval(&self, sigma: f64) -> C64 {
        match self {
            ClosedForm::Laguerre { alpha, shift, coeffs } => {
                let mut l = Vec::with_capacity(coeffs.len());
                laguerre_values(coeffs.len(), 2.0 * alpha * sigma, &mut l);
                let env = (2.0 * alpha).sqrt() * (-C64::new(*alpha, *shift) * sigma).exp();
                env * coeffs.iter().zip(&l).map(|(c, v)| c * v).sum::<C64>()
            }
            _ => self
                .exp_terms()
                .expect("exponential type")
                .iter()
                .map(|t| t.coeff * sigma.powi(t.power as i32) * (-t.rate * sigma).exp())
                .sum(),
        }
    }

    /// Closed form of the conjugate profile σ ↦ conj f(σ).
    pub fn conj(&self) -> ClosedForm {
        match self {
            ClosedForm::Exponential { k, alpha } => ClosedForm::Exponential {
                k: k.conj(),
                alpha: *alpha,
            },
            ClosedForm::ExpPoly { terms } => ClosedForm::ExpPoly {
                terms: terms
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff.conj(),
                        power: t.power,
                        rate: t.rate.conj(),
                    })
                    .collect(),
            },
            ClosedForm::Laguerre { alpha, shift, coeffs } => ClosedForm::Laguerre {
                alpha: *alpha,
                shift: -shift,
                coeffs: coeffs.iter().map(|c| c.conj()).collect(),
            },
        }
    }

    /// Closed form of c·f.
    pub fn scale(&self, c: C64) -> ClosedForm {
        match self {
            ClosedForm::Exponential { k, alpha } => ClosedForm::Exponential {
                k: k * c,
                alpha: *alpha,
            },
            ClosedForm::ExpPoly { terms } => ClosedForm::ExpPoly {
                terms: terms
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff * c,
                        ..*t
                    })
                    .collect(),
            },
            ClosedForm::Laguerre { alpha, shift, coeffs } => ClosedForm::Laguerre {
                alpha: *alpha,
                shift: *shift,
                coeffs: coeffs.iter().map(|v| v * c).collect(),
            },
        }
    }

    /// Closed form of f + g, when both share a representation.
    pub fn add(&self, other: &ClosedForm) -> Option<ClosedForm> {
        if let (Some(mut a), Some(b)) = (self.exp_terms(), other.exp_terms()) {
            a.extend(b);
            return Some(ClosedForm::ExpPoly { terms: a });
        }
        match (self, other) {
            (
                ClosedForm::Laguerre {
                    alpha: a1,
                    shift: t1,
                    coeffs: c1,
                },
                ClosedForm::Laguerre {
                    alpha: a2,
                    shift: t2,
                    coeffs: c2,
                },
            ) if a1 == a2 && t1 == t2 => {
                let n = c1.len().max(c2.len());
                let coeffs = (0..n)
                    .map(|j| c1.get(j).copied().unwrap_or_default() + c2.get(j).copied().unwrap_or_default())
                    .collect();
                Some(ClosedForm::Laguerre {
                    alpha: *a1,
                    shift: *t1,
                    coeffs,
                })
            }
            _ => None,
        }
    }

    /// Image under f ↦ e^{iθ} λ⁻¹ e^{iεs₀σ} f(σ/λ²) with ε = +1 (`plus = true`) or −1.
    pub fn transform(&self, theta: f64, s0: f64, lambda: f64, plus: bool) -> ClosedForm {
        let phase = C64::from_polar(1.0, theta);
        let eps = if plus { 1.0 } else { -1.0 };
        let l2 = lambda * lambda;
        match self {
            ClosedForm::Laguerre { alpha, shift, coeffs } => ClosedForm::Laguerre {
                alpha: alpha / l2,
                shift: shift / l2 - eps * s0,
                coeffs: coeffs.iter().map(|c| c * phase).collect(),
            },
            _ => ClosedForm::ExpPoly {
                terms: self
                    .exp_terms()
                    .expect("exponential type")
                    .iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff * phase * lambda.powi(-1 - 2 * t.power as i32),
                        power: t.power,
                        rate: t.rate / l2 - C64::new(0.0, eps * s0),
                    })
                    .collect(),
            },
        }
    }

    /// ∫₀^∞ |f|² dσ.
    pub fn l2_sq(&self) -> f64 {
        match self {
            ClosedForm::Laguerre { coeffs, .. } => coeffs.iter().map(|c| c.norm_sqr()).sum(),
            _ => {
                let t = self.exp_terms().expect("exponential type");
                let mut acc = C64::new(0.0, 0.0);
                for a in &t {
                    for b in &t {
                        let n = a.power + b.power;
                        acc += a.coeff * b.coeff.conj() * factorial(n) / (a.rate + b.rate.conj()).powu(n + 1);
                    }
                }
                acc.re
            }
        }
    }

    /// (1/(π√2)) ∫₀^∞ e^{izσ} f(σ) dσ for Im z > 0, together with its z-derivative.
    pub fn holo_with_derivative(&self, z: C64) -> (C64, C64) {
        let c = 1.0 / (PI * 2f64.sqrt());
        let i = C64::i();
        match self {
            ClosedForm::Laguerre { alpha, shift, coeffs } => {
                let q = C64::new(*alpha, *shift) - i * z;
                let m = q - 2.0 * alpha;
                let (mut v, mut d) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                let mut mp = C64::new(1.0, 0.0);
                let mut qp = 1.0 / q;
                for (j, cj) in coeffs.iter().enumerate() {
                    let jf = j as f64;
                    v += cj * mp * qp;
                    let dm = if j == 0 { C64::new(0.0, 0.0) } else { jf * mp / m };
                    d += cj * (dm * qp - (jf + 1.0) * mp * qp / q);
                    mp *= m;
                    qp /= q;
                }
                let s = (2.0 * alpha).sqrt() * c;
                (s * v, -i * s * d)
            }
            _ => {
                let (mut v, mut d) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for t in self.exp_terms().expect("exponential type") {
                    let q = t.rate - i * z;
                    let f = factorial(t.power);
                    v += t.coeff * f / q.powu(t.power + 1);
                    d += t.coeff * f * f64::from(t.power + 1) * i / q.powu(t.power + 2);
                }
                (c * v, c * d)
            }
        }
    }

    /// (1/√2π) ∫₀^∞ e^{isσ} f(σ) φ_k(r², σ) dσ, the real-space value of band k with positive sign.
    pub fn band_plus(&self, k: usize, r2: f64, s: f64) -> C64 {
        match self {
            ClosedForm::Laguerre { alpha, shift, coeffs } => {
                let table = laguerre_band_table(*alpha, *shift, coeffs.len(), k + 1, r2, s);
                (0..coeffs.len()).map(|j| coeffs[j] * table[j * (k + 1) + k]).sum()
            }
            _ => {
                let pref = 1.0 / (PI * 2f64.sqrt());
                self.exp_terms()
                    .expect("exponential type")
                    .iter()
                    .map(|t| {
                        let p = t.rate + r2 - C64::new(0.0, s);
                        let sign = if t.power % 2 == 0 { 1.0 } else { -1.0 };
                        pref * t.coeff * sign * band_kernel_derivative(k as u32, t.power, p, r2)
                    })
                    .sum()
            }
        }
    }
}

/// Table G_{jk} = (1/√2π)∫ e^{isσ} ψ_j(σ) φ_k(r², σ) dσ for the Laguerre functions ψ_j of
/// scale α and modulation t; row-major with `nk` columns.
pub fn laguerre_band_table(alpha: f64, t: f64, nj: usize, nk: usize, r2: f64, s: f64) -> Vec<C64> {
    let p = C64::new(alpha + r2, t - s);
    let inv_p = 1.0 / p;
    let a = 2.0 * alpha - p;
    let b = 2.0 * r2 - p;
    let c = p - 2.0 * alpha - 2.0 * r2;
    let mut h = vec![C64::new(0.0, 0.0); nj * nk];
    for j in 0..nj {
        for k in 0..nk {
            let mut rhs = if j == 0 && k == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            if j > 0 {
                rhs -= a * h[(j - 1) * nk + k];
            }
            if k > 0 {
                rhs -= b * h[j * nk + k - 1];
            }
            if j > 0 && k > 0 {
                rhs -= c * h[(j - 1) * nk + k - 1];
            }
            h[j * nk + k] = rhs * inv_p;
        }
    }
    let pref = alpha.sqrt() / PI;
    for v in &mut h {
        *v *= pref;
    }
    h
}

/// A profile sampled on a shared σ-grid, optionally with its exact closed form.
///
/// When a closed form is present, the samples are its values at the nodes; evaluation,
/// norms and transforms then use the closed form.
#[derive(Debug, Clone)]
pub struct SigmaProfile {
    grid: Arc<SigmaGrid>,
    values: Vec<C64>,
    closed: Option<ClosedForm>,
}

impl SigmaProfile {
    /// Sampled profile on `grid`.
    pub fn sampled(grid: Arc<SigmaGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(HwError::InvalidInput(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HwError::NonFinite {
                what: "profile samples",
            });
        }
        Ok(Self {
            grid,
            values,
            closed: None,
        })
    }

    /// Profile given by a closed form, sampled on `grid`.
    pub fn from_closed(grid: Arc<SigmaGrid>, form: ClosedForm) -> Result<Self> {
        form.validate()?;
        let values = grid.nodes().iter().map(|&s| form.eval(s)).collect();
        Ok(Self {
            grid,
            values,
            closed: Some(form),
        })
    }

    /// Identically zero profile.
    pub fn zero(grid: Arc<SigmaGrid>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            values,
            closed: Some(ClosedForm::ExpPoly { terms: Vec::new() }),
        }
    }

    /// The grid.
    pub fn grid(&self) -> &Arc<SigmaGrid> {
        &self.grid
    }

    /// Samples at the grid nodes.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Closed form, if known.
    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed.as_ref()
    }

    /// Drops the closed form, keeping only samples.
    pub fn into_sampled(self) -> Self {
        Self { closed: None, ..self }
    }

    /// Value f(σ): exact for closed forms, interpolated otherwise.
    pub fn eval(&self, sigma: f64) -> C64 {
        match &self.closed {
            Some(f) => f.eval(sigma),
            None => self.grid.interpolate(&self.values, sigma),
        }
    }

    /// c·f.
    pub fn scale(&self, c: C64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            closed: self.closed.as_ref().map(|f| f.scale(c)),
        }
    }

    /// a·f + b·g on the same grid.
    pub fn lin_comb(a: C64, f: &Self, b: C64, g: &Self) -> Result<Self> {
        if f.grid.nodes() != g.grid.nodes() {
            return Err(HwError::InvalidInput("profiles live on different grids".into()));
        }
        let values = f.values.iter().zip(&g.values).map(|(x, y)| a * x + b * y).collect();
        let closed = match (&f.closed, &g.closed) {
            (Some(x), Some(y)) => x.scale(a).add(&y.scale(b)),
            _ => None,
        };
        Ok(Self {
            grid: f.grid.clone(),
            values,
            closed,
        })
    }

    /// Conjugate profile.
    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
            closed: self.closed.as_ref().map(|f| f.conj()),
        }
    }

    /// ∫₀^∞ g(σ, f(σ)) dσ by adaptive quadrature on the closed form or the interpolant.
    pub fn integral<G>(&self, g: G, spec: &QuadratureSpec, what: &'static str) -> Result<C64>
    where
        G: Fn(f64, C64) -> C64,
    {
        match &self.closed {
            Some(form) => Ok(integrate_halfline(|s| g(s, form.eval(s)), spec)?.value),
            None => {
                let mut breaks = Vec::with_capacity(self.grid.len() + 1);
                breaks.push(0.0);
                breaks.extend_from_slice(self.grid.nodes());
                Ok(integrate_panels(|s| g(s, self.eval(s)), &breaks, spec, what)?.value)
            }
        }
    }

    /// Σ_a W_a g(σ_a, f_a) with the grid's nodal weights.
    pub fn nodal_sum<G>(&self, g: G) -> C64
    where
        G: Fn(f64, C64) -> C64,
    {
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((s, w), v)| *w * g(*s, *v))
            .sum()
    }

    /// ∫₀^∞ |f|² dσ, exact for closed forms.
    pub fn l2_sq(&self, spec: &QuadratureSpec) -> Result<f64> {
        match &self.closed {
            Some(f) => Ok(f.l2_sq()),
            None => Ok(self.integral(|_, v| C64::new(v.norm_sqr(), 0.0), spec, "∫|f|²")?.re),
        }
    }

    /// (1/(π√2)) ∫ e^{izσ} f dσ and its z-derivative.
    pub fn holo_with_derivative(&self, z: C64, spec: &QuadratureSpec) -> Result<(C64, C64)> {
        if z.im <= 0.0 {
            return Err(HwError::DomainError(format!(
                "holomorphic transform needs Im z > 0, got {z}"
            )));
        }
        if let Some(f) = &self.closed {
            return Ok(f.holo_with_derivative(z));
        }
        let c = 1.0 / (PI * 2f64.sqrt());
        let i = C64::i();
        let v = self.integral(|s, f| (i * z * s).exp() * f, spec, "holomorphic transform")?;
        let d = self.integral(|s, f| i * s * (i * z * s).exp() * f, spec, "holomorphic derivative")?;
        Ok((c * v, c * d))
    }
}
