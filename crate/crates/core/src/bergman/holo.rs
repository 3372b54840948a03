//! Holomorphic functions on ℂ₊ and general complex functions on ℂ₊.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::catalog::{catalog_eval, f1, f2, f3, CatalogEntry};
use crate::error::{HwError, Result};
use crate::numerics::{gamma, integrate_line, integrate_uhp, QuadratureSpec, C64};
use crate::spectral::{ConvolutionPlan, SigmaProfile};

/// Step of the central difference used for derivatives of catalog projections.
const DERIVATIVE_STEP: f64 = 1e-3;

/// One term c·(z − p)^{−n} of a rational function with its pole p in the lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalTerm {
    /// Coefficient c.
    pub coeff: C64,
    /// Pole p, Im p < 0.
    pub pole: C64,
    /// Order n ≥ 1.
    pub order: u32,
}

/// A holomorphic function on the open upper half-plane.
#[derive(Debug, Clone)]
pub enum HoloFn {
    /// F(z) = scale·(1/(π√2)) ∫₀^∞ e^{izσ} f(σ) dσ, the transform of a σ-profile in the
    /// weighted Bergman space A²_{1−k} (k = 1 is the Hardy space).
    PaleyWiener {
        /// The σ-profile f.
        profile: SigmaProfile,
        /// Weight index k < 1, or k = 1 for the Hardy space.
        k: f64,
        /// Overall scale.
        scale: f64,
    },
    /// A catalog entry.
    Catalog(CatalogEntry),
    /// Σ c (z − p)^{−n}.
    Rational(Vec<RationalTerm>),
}

impl HoloFn {
    /// Builds a rational function, checking that every pole lies in the closed lower half-plane.
    pub fn rational(terms: Vec<RationalTerm>) -> Result<Self> {
        for t in &terms {
            if t.pole.im >= 0.0 || t.order == 0 || !t.pole.is_finite() {
                return Err(HwError::InvalidInput(format!(
                    "rational term with pole {} and order {} is not holomorphic and decaying on ℂ₊",
                    t.pole, t.order
                )));
            }
        }
        Ok(HoloFn::Rational(terms))
    }

    /// Value at z, Im z > 0.
    pub fn eval(&self, z: C64, spec: &QuadratureSpec) -> Result<C64> {
        Ok(self.eval_with_derivative(z, spec)?.0)
    }

    /// Derivative at z, Im z > 0.
    pub fn derivative(&self, z: C64, spec: &QuadratureSpec) -> Result<C64> {
        Ok(self.eval_with_derivative(z, spec)?.1)
    }

    /// Value and derivative at z, Im z > 0.
    pub fn eval_with_derivative(&self, z: C64, spec: &QuadratureSpec) -> Result<(C64, C64)> {
        if !(z.im > 0.0) || !z.is_finite() {
            return Err(HwError::DomainError(format!(
                "holomorphic functions live on Im z > 0, got {z}"
            )));
        }
        match self {
            HoloFn::PaleyWiener { profile, scale, .. } => {
                let (v, d) = profile.holo_with_derivative(z, spec)?;
                Ok((v * *scale, d * *scale))
            }
            HoloFn::Rational(terms) => {
                let (mut v, mut d) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for t in terms {
                    let w = 1.0 / (z - t.pole);
                    let p = w.powu(t.order);
                    v += t.coeff * p;
                    d -= t.coeff * f64::from(t.order) * p * w;
                }
                Ok((v, d))
            }
            HoloFn::Catalog(entry) => {
                let v = catalog_eval(*entry, z)?;
                let d = match entry {
                    CatalogEntry::FQ => catalog_eval(CatalogEntry::FQPrime, z)?,
                    CatalogEntry::FQPrime => catalog_eval(CatalogEntry::FQSecond, z)?,
                    CatalogEntry::FQSecond => {
                        let w = z + C64::i();
                        -6.0 * C64::i() * 2f64.sqrt() / (w * w * w * w)
                    }
                    CatalogEntry::FTilde => {
                        let w = z + C64::i();
                        let s2 = 2f64.sqrt();
                        2.0 * C64::i() * s2 / (w * w * w) + 6.0 * s2 / (w * w * w * w)
                    }
                    _ => {
                        let h = DERIVATIVE_STEP * z.im.min(1.0);
                        let at = |dz: C64| catalog_eval(*entry, z + dz);
                        let (hr, hi) = (C64::new(h, 0.0), C64::new(0.0, h));
                        let dr = (8.0 * (at(hr)? - at(-hr)?) - (at(2.0 * hr)? - at(-2.0 * hr)?)) / (12.0 * h);
                        let di = (8.0 * (at(hi)? - at(-hi)?) - (at(2.0 * hi)? - at(-2.0 * hi)?)) / (12.0 * h);
                        0.5 * (dr - C64::i() * di)
                    }
                };
                Ok((v, d))
            }
        }
    }

    /// ∫_{ℂ₊} |F(s + it)|² t^{−k} ds dt by adaptive quadrature, for k < 1.
    pub fn weighted_norm_sq(&self, k: f64, spec: &QuadratureSpec) -> Result<f64> {
        if !(k < 1.0) {
            return Err(HwError::InvalidInput(format!(
                "weighted Bergman norm needs k < 1, got {k}"
            )));
        }
        let failure = std::cell::RefCell::new(None::<HwError>);
        let r = integrate_uhp(
            |z| match self.eval(z, spec) {
                Ok(v) => C64::new(v.norm_sqr() * z.im.powf(-k), 0.0),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(f64::NAN, 0.0)
                }
            },
            spec,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(r?.value.re)
    }

    /// ∫_ℝ |F(s + it)|² ds at fixed height t > 0.
    pub fn line_norm_sq(&self, t: f64, spec: &QuadratureSpec) -> Result<f64> {
        let failure = std::cell::RefCell::new(None::<HwError>);
        let r = integrate_line(
            |s| match self.eval(C64::new(s, t), spec) {
                Ok(v) => C64::new(v.norm_sqr(), 0.0),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    C64::new(f64::NAN, 0.0)
                }
            },
            0.0,
            1.0,
            spec,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(r?.value.re)
    }

    /// sup_{t>0} ∫|F(s + it)|² ds, approximated by the Richardson extrapolation
    /// (8I(t) − 6I(2t) + I(4t))/3 at t = `t0`, exact for I quadratic in t.
    pub fn hardy_norm_sq(&self, t0: f64, spec: &QuadratureSpec) -> Result<f64> {
        let (a, b, c) = (
            self.line_norm_sq(t0, spec)?,
            self.line_norm_sq(2.0 * t0, spec)?,
            self.line_norm_sq(4.0 * t0, spec)?,
        );
        Ok((8.0 * a - 6.0 * b + c) / 3.0)
    }
}

/// Paley–Wiener transform F(z) = (1/√(2π)) ∫₀^∞ e^{izσ} f(σ) dσ in A²_{1−k}.
///
/// `k < 1` selects a weighted Bergman space and `k = 1` the Hardy space.
pub fn pw_forward(f: &SigmaProfile, k: f64) -> Result<HoloFn> {
    if !(k <= 1.0) {
        return Err(HwError::InvalidInput(format!(
            "Paley–Wiener weight must satisfy k ≤ 1, got {k}"
        )));
    }
    Ok(HoloFn::PaleyWiener {
        profile: f.clone(),
        k,
        scale: PI.sqrt(),
    })
}

/// The holomorphic representative F_h(z) = (1/(π√2)) ∫₀^∞ e^{izσ} f(σ) dσ of a V₀⁺ field.
pub fn holo_from_v0(f: &SigmaProfile) -> HoloFn {
    HoloFn::PaleyWiener {
        profile: f.clone(),
        k: 0.0,
        scale: 1.0,
    }
}

/// Γ(1−k)/2^{1−k} ∫₀^∞ |f|² σ^{k−1} dσ, the weighted Bergman norm of the Paley–Wiener transform.
pub fn pw_norm_sq(f: &SigmaProfile, k: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(k < 1.0) {
        return Err(HwError::InvalidInput(format!(
            "weighted Bergman norm needs k < 1, got {k}"
        )));
    }
    let g = gamma(1.0 - k)? / 2f64.powf(1.0 - k);
    let i = f.integral(
        |s, v| C64::new(v.norm_sqr() * s.powf(k - 1.0), 0.0),
        spec,
        "∫|f|²σ^{k−1}",
    )?;
    Ok(g * i.re)
}

/// The σ-profile of the product field gh of two V₀⁺ fields: (f_g ∗ f_h)/(π√2).
pub fn product_profile(g: &SigmaProfile, h: &SigmaProfile, plan: &ConvolutionPlan) -> Result<SigmaProfile> {
    if g.grid().nodes() != plan.grid().nodes() || h.grid().nodes() != plan.grid().nodes() {
        return Err(HwError::InvalidInput(
            "product profile needs both factors on the plan's grid".into(),
        ));
    }
    let c = 1.0 / (PI * 2f64.sqrt());
    let values = plan
        .convolve(g.values(), h.values())
        .into_iter()
        .map(|v| v * c)
        .collect();
    SigmaProfile::sampled(plan.grid().clone(), values)
}

/// A complex function on ℂ₊, not necessarily holomorphic.
#[derive(Clone)]
pub struct CPlaneFn {
    name: String,
    f: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
}

impl fmt::Debug for CPlaneFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CPlaneFn").field("name", &self.name).finish()
    }
}

impl CPlaneFn {
    /// Wraps a closure.
    pub fn new<F: Fn(C64) -> C64 + Send + Sync + 'static>(name: impl Into<String>, f: F) -> Self {
        CPlaneFn {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// F₁(z) = 1/(|z+i|(z+i)).
    pub fn f1() -> Self {
        CPlaneFn::new("F1", f1)
    }

    /// F₂(z) = F₁(z)(2i/(z+i) − 1).
    pub fn f2() -> Self {
        CPlaneFn::new("F2", f2)
    }

    /// F₃(z) = F₁(z)(−2i/(z̄−i) − 1).
    pub fn f3() -> Self {
        CPlaneFn::new("F3", f3)
    }

    /// F_j for j ∈ {1, 2, 3}.
    pub fn f_j(j: usize) -> Result<Self> {
        match j {
            1 => Ok(CPlaneFn::f1()),
            2 => Ok(CPlaneFn::f2()),
            3 => Ok(CPlaneFn::f3()),
            _ => Err(HwError::InvalidInput(format!(
                "F_j is defined for j ∈ {{1,2,3}}, got {j}"
            ))),
        }
    }

    /// A holomorphic function viewed as a plane function; evaluation failures become NaN.
    pub fn from_holo(h: HoloFn, spec: QuadratureSpec) -> Self {
        let name = match &h {
            HoloFn::Catalog(e) => e.name().to_string(),
            HoloFn::PaleyWiener { .. } => "paley-wiener".to_string(),
            HoloFn::Rational(_) => "rational".to_string(),
        };
        let h = Arc::new(h);
        CPlaneFn::new(name, move |z| h.eval(z, &spec).unwrap_or(C64::new(f64::NAN, f64::NAN)))
    }

    /// Name used in reports.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Value at z.
    pub fn eval(&self, z: C64) -> C64 {
        (self.f)(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ClosedForm, ExpTerm, SigmaGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::new(1e-12, 1e-10)
    }

    fn closed(form: ClosedForm) -> SigmaProfile {
        SigmaProfile::from_closed(Arc::new(SigmaGrid::default_grid()), form).unwrap()
    }

    fn random_exp_poly(rng: &mut ChaCha8Rng, min_power: u32) -> ClosedForm {
        let terms = (0..3)
            .map(|_| ExpTerm {
                coeff: C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                power: rng.random_range(min_power..min_power + 3),
                rate: C64::new(rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)),
            })
            .collect();
        ClosedForm::ExpPoly { terms }
    }

    /// Σ c_i c̄_j Γ(n_i+n_j+k)/(a_i+ā_j)^{n_i+n_j+k}, the exact value of ∫|f|²σ^{k−1}.
    fn exact_weighted(form: &ClosedForm, k: f64) -> f64 {
        let terms = form.exp_terms().unwrap();
        let mut acc = C64::new(0.0, 0.0);
        for a in &terms {
            for b in &terms {
                let p = f64::from(a.power + b.power) + k;
                acc += a.coeff * b.coeff.conj() * gamma(p).unwrap() / (a.rate + b.rate.conj()).powf(p);
            }
        }
        acc.re
    }

    #[test]
    fn laplace_transform_of_exponential() {
        let f = closed(ClosedForm::Exponential {
            k: C64::new((2.0 * PI).sqrt(), 0.0),
            alpha: 1.0,
        });
        let h = pw_forward(&f, 0.0).unwrap();
        for z in [C64::new(0.3, 0.2), C64::new(-2.0, 1.5), C64::new(0.0, 7.0)] {
            let want = C64::i() / (z + C64::i());
            assert!((h.eval(z, &spec()).unwrap() - want).norm() < 1e-14);
        }
        let zero = pw_forward(&SigmaProfile::zero(Arc::new(SigmaGrid::default_grid())), 0.0).unwrap();
        assert_eq!(zero.eval(C64::i(), &spec()).unwrap(), C64::new(0.0, 0.0));
        assert!(pw_forward(&f, 1.5).is_err());
    }

    #[test]
    fn ground_state_representative() {
        let q = closed(ClosedForm::Exponential {
            k: C64::new(2.0 * PI, 0.0),
            alpha: 1.0,
        });
        let h = holo_from_v0(&q);
        let (v, d) = h.eval_with_derivative(C64::i(), &spec()).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).norm() < 1e-14);
        assert!((d - C64::i() / (2.0 * 2f64.sqrt())).norm() < 1e-14);
        let z = C64::new(0.4, 0.9);
        let fq = HoloFn::Catalog(CatalogEntry::FQ).eval(z, &spec()).unwrap();
        assert!((h.eval(z, &spec()).unwrap() - fq).norm() < 1e-14);
    }

    #[test]
    fn sampled_transform_matches_closed_form() {
        let form = ClosedForm::ExpPoly {
            terms: vec![ExpTerm {
                coeff: C64::new(1.0, 0.5),
                power: 1,
                rate: C64::new(1.0, -0.3),
            }],
        };
        let f = closed(form);
        let s = f.clone().into_sampled();
        let z = C64::new(0.2, 0.8);
        let a = holo_from_v0(&f).eval(z, &spec()).unwrap();
        let b = holo_from_v0(&s).eval(z, &spec()).unwrap();
        assert!((a - b).norm() < 1e-8 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn catalog_derivatives_match_closed_forms() {
        let z = C64::new(0.7, 1.3);
        for (e, de) in [
            (CatalogEntry::FQ, CatalogEntry::FQPrime),
            (CatalogEntry::FQPrime, CatalogEntry::FQSecond),
        ] {
            let d = HoloFn::Catalog(e).derivative(z, &spec()).unwrap();
            assert!((d - catalog_eval(de, z).unwrap()).norm() < 1e-14);
        }
        for e in [CatalogEntry::FQSecond, CatalogEntry::FTilde, CatalogEntry::P0F1] {
            let h = HoloFn::Catalog(e);
            let d = h.derivative(z, &spec()).unwrap();
            let eps = 1e-5;
            let fd = (h.eval(z + eps, &spec()).unwrap() - h.eval(z - eps, &spec()).unwrap()) / (2.0 * eps);
            assert!((d - fd).norm() < 1e-7 * (1.0 + d.norm()), "{e}: {d} vs {fd}");
        }
    }

    #[test]
    fn rational_functions() {
        let h = HoloFn::rational(vec![RationalTerm {
            coeff: C64::new(1.0, 0.0),
            pole: -C64::i(),
            order: 2,
        }])
        .unwrap();
        let z = C64::new(1.0, 2.0);
        let (v, d) = h.eval_with_derivative(z, &spec()).unwrap();
        assert!((v - 1.0 / ((z + C64::i()) * (z + C64::i()))).norm() < 1e-15);
        assert!((d + 2.0 / (z + C64::i()).powu(3)).norm() < 1e-15);
        assert!(HoloFn::rational(vec![RationalTerm {
            coeff: C64::new(1.0, 0.0),
            pole: C64::i(),
            order: 1
        }])
        .is_err());
    }

    #[test]
    fn weighted_isometry_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = QuadratureSpec::new(1e-11, 1e-9);
        for k in [0.0, -1.0] {
            for _ in 0..2 {
                let form = random_exp_poly(&mut rng, 1);
                let exact = gamma(1.0 - k).unwrap() / 2f64.powf(1.0 - k) * exact_weighted(&form, k);
                let f = closed(form);
                let rhs = pw_norm_sq(&f, k, &s).unwrap();
                assert!((rhs - exact).abs() < 1e-9 * exact, "rhs {rhs} vs {exact}");
                let lhs = pw_forward(&f, k).unwrap().weighted_norm_sq(k, &s).unwrap();
                assert!((lhs - exact).abs() < 1e-6 * exact, "k={k}: {lhs} vs {exact}");
            }
        }
    }

    #[test]
    fn hardy_isometry_on_random_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..3 {
            let form = random_exp_poly(&mut rng, 0);
            let exact = form.l2_sq();
            let h = pw_forward(&closed(form), 1.0).unwrap();
            let sup = h.hardy_norm_sq(1e-4, &spec()).unwrap();
            assert!((sup - exact).abs() < 1e-6 * exact, "{sup} vs {exact}");
        }
    }

    #[test]
    fn l2_norm_of_v0_field_matches_bergman_norm() {
        let form = ClosedForm::ExpPoly {
            terms: vec![ExpTerm {
                coeff: C64::new(0.3, -1.0),
                power: 1,
                rate: C64::new(1.3, 0.4),
            }],
        };
        let s = QuadratureSpec::new(1e-11, 1e-9);
        let f = closed(form);
        let field = 0.5
            * f.integral(|x, v| C64::new(v.norm_sqr() / x, 0.0), &s, "test")
                .unwrap()
                .re;
        let bergman = holo_from_v0(&f).weighted_norm_sq(0.0, &s).unwrap();
        assert!((field - PI * bergman).abs() < 1e-6 * field);
    }

    #[test]
    fn product_of_representatives() {
        let grid = Arc::new(SigmaGrid::log_spaced(1e-5, 60.0, 2048).unwrap());
        let plan = ConvolutionPlan::new(grid.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = SigmaProfile::from_closed(grid.clone(), random_exp_poly(&mut rng, 0))
            .unwrap()
            .into_sampled();
        let h = SigmaProfile::from_closed(grid, random_exp_poly(&mut rng, 0))
            .unwrap()
            .into_sampled();
        let gh = product_profile(&g, &h, &plan).unwrap();
        for z in [C64::new(0.1, 1.0), C64::new(-0.8, 0.6), C64::new(1.5, 2.0)] {
            let want = holo_from_v0(&g).eval(z, &spec()).unwrap() * holo_from_v0(&h).eval(z, &spec()).unwrap();
            let got = holo_from_v0(&gh).eval(z, &spec()).unwrap();
            assert!((got - want).norm() < 1e-8 * want.norm(), "{got} vs {want}");
        }
    }
}
