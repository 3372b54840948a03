//! Globally adaptive Gauss–Kronrod quadrature on intervals, half-lines and the upper half-plane.
//!
//! Refinement always bisects the panel with the largest error estimate (ties broken
//! by panel order), so results are bit-reproducible for a fixed integrand.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::gauss::{WG10, WGK21, XGK21};
use crate::error::{HwError, Result};

/// Tolerances and budget of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target.
    pub rel_tol: f64,
    /// Maximum number of panel bisections.
    pub max_subdivisions: usize,
    /// Breakpoint and substitution scale used to map σ ∈ (0, ∞) onto finite panels.
    pub halfline_decay_scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            halfline_decay_scale: 1.0,
        }
    }
}

impl QuadratureSpec {
    /// Builds a spec with the given tolerances and default budget.
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Returns a copy with a different subdivision budget.
    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    /// Returns a copy with a different half-line scale.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.halfline_decay_scale = scale;
        self
    }

    /// Checks the invariants of the spec.
    pub fn validate(&self) -> Result<()> {
        let tol_ok = self.abs_tol >= 0.0 && self.rel_tol >= 0.0 && (self.abs_tol > 0.0 || self.rel_tol > 0.0);
        if !tol_ok || self.max_subdivisions < 1 || !(self.halfline_decay_scale > 0.0) {
            return Err(HwError::InvalidInput(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    fn target(&self, value: C64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Value and error estimate of an adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Integral estimate.
    pub value: C64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of panels in the final partition.
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

fn kronrod_panel<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, what: &'static str) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !(fc.re.is_finite() && fc.im.is_finite()) {
        return Err(HwError::NonFinite { what });
    }
    let mut vals = [C64::new(0.0, 0.0); 21];
    vals[10] = fc;
    let mut k = fc * WGK21[10];
    let mut g = C64::new(0.0, 0.0);
    for j in 0..10 {
        let x = h * XGK21[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        if !(f1.re.is_finite() && f1.im.is_finite() && f2.re.is_finite() && f2.im.is_finite()) {
            return Err(HwError::NonFinite { what });
        }
        vals[j] = f1;
        vals[20 - j] = f2;
        k += (f1 + f2) * WGK21[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG10[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = (fc - mean).norm() * WGK21[10];
    for j in 0..10 {
        asc += WGK21[j] * ((vals[j] - mean).norm() + (vals[20 - j] - mean).norm());
    }
    asc *= h.abs();
    let raw = ((k - g) * h).norm();
    let error = if asc > 0.0 && raw > 0.0 {
        asc * (200.0 * raw / asc).powf(1.5).min(1.0)
    } else {
        raw
    };
    let value = k * h;
    let error = error.max(50.0 * f64::EPSILON * (value.norm()));
    Ok(Panel { a, b, value, error })
}

/// Adaptive integration over a union of finite panels sharing one error budget.
pub fn integrate_panels<F: Fn(f64) -> C64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
    what: &'static str,
) -> Result<Integral> {
    spec.validate()?;
    let mut panels = Vec::with_capacity(breaks.len() + 64);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            panels.push(kronrod_panel(&f, w[0], w[1], what)?);
        }
    }
    if panels.is_empty() {
        return Ok(Integral {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        });
    }
    let mut splits = 0;
    loop {
        let value: C64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.target(value) {
            return Ok(Integral {
                value,
                error,
                panels: panels.len(),
            });
        }
        if splits >= spec.max_subdivisions {
            return Err(HwError::NonConvergence {
                what,
                estimate: error,
                requested: spec.target(value),
            });
        }
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            return Err(HwError::NonConvergence {
                what,
                estimate: error,
                requested: spec.target(value),
            });
        }
        panels[worst] = kronrod_panel(&f, p.a, m, what)?;
        panels.push(kronrod_panel(&f, m, p.b, what)?);
        splits += 1;
    }
}

/// Adaptive integral of `f` over the finite interval [a, b].
pub fn integrate_interval<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_panels(f, &[a, b], spec, "integrate_interval")
}

/// Adaptive integral of `f` over σ ∈ (0, ∞).
///
/// The half-line is split at σ = λ (λ = `halfline_decay_scale`); the finite part
/// uses Gauss–Kronrod panels directly, the tail is mapped by σ = λ(1 + t/(1−t)),
/// t ∈ [0, 1), which keeps exponential and power-law tails regular.
pub fn integrate_halfline<F: Fn(f64) -> C64>(f: F, spec: &QuadratureSpec) -> Result<Integral> {
    let lam = spec.halfline_decay_scale;
    let g = |x: f64| {
        if x < 1.0 {
            f(lam * x) * lam
        } else {
            let t = x - 1.0;
            let om = 1.0 - t;
            let sigma = lam * (1.0 + t / om);
            let v = f(sigma);
            if v.re == 0.0 && v.im == 0.0 {
                v
            } else {
                v * (lam / (om * om))
            }
        }
    };
    integrate_panels(g, &[0.0, 1.0, 2.0], spec, "integrate_halfline")
}

/// Adaptive integral of `f` over the real line, split at `center`.
pub fn integrate_line<F: Fn(f64) -> C64>(f: F, center: f64, scale: f64, spec: &QuadratureSpec) -> Result<Integral> {
    let g = |x: f64| {
        let (t, sgn) = if x < 0.0 { (-x, -1.0) } else { (x, 1.0) };
        let om = 1.0 - t;
        let s = center + sgn * scale * t / om;
        let v = f(s);
        if v.re == 0.0 && v.im == 0.0 {
            v
        } else {
            v * (scale / (om * om))
        }
    };
    integrate_panels(g, &[-1.0, -0.5, 0.0, 0.5, 1.0], spec, "integrate_line")
}

/// Adaptive integral of `f(z)` over the open upper half-plane {s + it : t > 0}.
///
/// The outer integral runs over t = u/(1−u), u ∈ (0, 1); the inner integral over
/// s ∈ ℝ is a [`integrate_line`] with width 1 + t, centred at `s_center`.
pub fn integrate_uhp<F: Fn(C64) -> C64>(f: F, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_uhp_centered(f, 0.0, spec)
}

/// [`integrate_uhp`] with the inner s-integrals centred at `s_center`.
pub fn integrate_uhp_centered<F: Fn(C64) -> C64>(f: F, s_center: f64, spec: &QuadratureSpec) -> Result<Integral> {
    spec.validate()?;
    let inner = QuadratureSpec {
        abs_tol: spec.abs_tol * 0.05,
        rel_tol: spec.rel_tol * 0.05,
        ..*spec
    };
    let failure = std::cell::RefCell::new(None::<HwError>);
    let outer = |u: f64| {
        let om = 1.0 - u;
        let t = u / om;
        let jac = 1.0 / (om * om);
        match integrate_line(|s| f(C64::new(s, t)), s_center, 1.0 + t, &inner) {
            Ok(r) => r.value * jac,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                C64::new(f64::NAN, 0.0)
            }
        }
    };
    let res = integrate_panels(outer, &[0.0, 0.25, 0.5, 0.75, 1.0], spec, "integrate_uhp");
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::new(1e-13, 1e-12)
    }

    #[test]
    fn halfline_examples() {
        let one = integrate_halfline(|s| C64::new((-s).exp(), 0.0), &spec()).unwrap();
        assert!((one.value.re - 1.0).abs() < 1e-12);
        let q = integrate_halfline(|s| C64::new(s * (-2.0 * s).exp(), 0.0), &spec()).unwrap();
        assert!((q.value.re - 0.25).abs() < 1e-12);
        let two_pi = 2.0 * std::f64::consts::PI;
        let n = integrate_halfline(|s| C64::new((two_pi * (-s).exp()).powi(2) / 2.0, 0.0), &spec()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((n.value.re - pi2).abs() < 1e-11 * pi2);
    }

    #[test]
    fn halfline_power_tail() {
        let r = integrate_halfline(|s| C64::new(1.0 / (1.0 + s).powi(3), 0.0), &spec()).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn divergent_integral_reports_nonconvergence() {
        let r = integrate_halfline(|s| C64::new((-s).exp() / s, 0.0), &spec().with_max_subdivisions(300));
        assert!(matches!(r, Err(HwError::NonConvergence { .. })));
    }

    #[test]
    fn nonfinite_integrand_is_reported() {
        let r = integrate_interval(|_| C64::new(f64::NAN, 0.0), 0.0, 1.0, &spec());
        assert!(matches!(r, Err(HwError::NonFinite { .. })));
    }

    #[test]
    fn uhp_examples() {
        let s = QuadratureSpec::new(1e-11, 1e-10);
        let i = C64::i();
        let r = integrate_uhp(|z| C64::new((z + i).norm().powi(-4), 0.0), &s).unwrap();
        assert!((r.value.re - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
        let f2 = |z: C64| {
            let a = (z + i).norm().powi(-4);
            let b = (i * 2.0 / (z + i) - 1.0).norm_sqr();
            C64::new(a * b, 0.0)
        };
        let r = integrate_uhp(f2, &s).unwrap();
        assert!((r.value.re - std::f64::consts::PI / 8.0).abs() < 1e-9);
        let odd = integrate_uhp(|z| C64::new(z.re * (z + 2.0 * i).norm().powi(-6), 0.0), &s).unwrap();
        assert!(odd.value.norm() < 1e-10);
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let s = QuadratureSpec {
            abs_tol: 0.0,
            rel_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(integrate_interval(|_| C64::new(1.0, 0.0), 0.0, 1.0, &s).is_err());
    }
}
