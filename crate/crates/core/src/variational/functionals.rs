//! The functionals J₊ and J_β, the gap δ(u), and the symmetry group action.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{HwError, Result};
use crate::numerics::{integrate_uhp, QuadratureSpec, C64};
use crate::spectral::{
    hk_norm, l4_norm_grid, quad_form_beta, synthesize, Band, BandField, ConvolutionPlan, GridField, SigmaProfile, Sign,
};

/// The infimum I₊ = π² of J₊ on V₀⁺.
pub const I_PLUS: f64 = PI * PI;

/// Parameters of the symmetry T_{s₀,θ,α}h(x,y,s) = e^{iθ} α h(αx, αy, α²(s + s₀)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryParams {
    /// Translation s₀ along the center.
    pub s0: f64,
    /// Phase θ.
    pub theta: f64,
    /// Dilation α > 0.
    pub alpha: f64,
}

impl SymmetryParams {
    /// Checked constructor.
    pub fn new(s0: f64, theta: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !s0.is_finite() || !theta.is_finite() {
            return Err(HwError::InvalidInput(format!(
                "symmetry parameters need α > 0 and finite values, got (s₀, θ, α) = ({s0}, {theta}, {alpha})"
            )));
        }
        Ok(Self { s0, theta, alpha })
    }

    /// The identity (0, 0, 1).
    pub fn identity() -> Self {
        Self {
            s0: 0.0,
            theta: 0.0,
            alpha: 1.0,
        }
    }

    /// Parameters of the inverse map.
    pub fn inverse(&self) -> Self {
        Self {
            s0: -self.s0 * self.alpha * self.alpha,
            theta: -self.theta,
            alpha: 1.0 / self.alpha,
        }
    }
}

/// Applies T_{s₀,θ,α} to one profile carried by a band of the given sign.
///
/// In σ-coordinates the map reads f(σ) ↦ e^{iθ} α⁻¹ e^{iεs₀σ} f(σ/α²); sampled profiles are
/// resampled on their own grid through the grid interpolant.
pub fn apply_symmetry_profile(p: &SymmetryParams, f: &SigmaProfile, sign: Sign) -> Result<SigmaProfile> {
    let eps = sign.as_f64();
    if let Some(form) = f.closed_form() {
        return SigmaProfile::from_closed(
            f.grid().clone(),
            form.transform(p.theta, p.s0, p.alpha, sign == Sign::Plus),
        );
    }
    let a2 = p.alpha * p.alpha;
    let phase = C64::from_polar(1.0 / p.alpha, p.theta);
    let values = f
        .grid()
        .nodes()
        .iter()
        .map(|&s| phase * C64::from_polar(1.0, eps * p.s0 * s) * f.eval(s / a2))
        .collect();
    SigmaProfile::sampled(f.grid().clone(), values)
}

/// Applies T_{s₀,θ,α} to every band of a field.
pub fn apply_symmetry(p: &SymmetryParams, u: &BandField) -> Result<BandField> {
    let bands = u
        .bands()
        .iter()
        .map(|b| {
            Ok(Band {
                k: b.k,
                sign: b.sign,
                profile: apply_symmetry_profile(p, &b.profile, b.sign)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    BandField::new(bands)
}

fn h1_sq_profile(f: &SigmaProfile, spec: &QuadratureSpec) -> Result<f64> {
    Ok(0.5 * f.l2_sq(spec)?)
}

/// ‖u‖⁴_{L⁴} of a V₀⁺ profile.
///
/// Closed forms use u(x, y, s) = F_h(s + i(x² + y²)), so that ‖u‖⁴_{L⁴} = π ∫_{ℂ₊} |F_h|⁴ dλ;
/// sampled profiles use the σ-space self-convolution of the plan.
pub fn l4_fourth_v0(f: &SigmaProfile, plan: &ConvolutionPlan, spec: &QuadratureSpec) -> Result<f64> {
    if let Some(form) = f.closed_form() {
        let tight = QuadratureSpec {
            abs_tol: spec.abs_tol.min(1e-13),
            rel_tol: spec.rel_tol.min(1e-12),
            ..*spec
        };
        let v = integrate_uhp(
            |z| C64::new(form.holo_with_derivative(z).0.norm_sqr().powi(2), 0.0),
            &tight,
        )?;
        return Ok(PI * v.value.re);
    }
    if f.grid().nodes() != plan.grid().nodes() {
        return Err(HwError::InvalidInput(
            "profile and convolution plan use different grids".into(),
        ));
    }
    let v = plan.l4_fourth(f.values());
    if !v.is_finite() {
        return Err(HwError::NonFinite { what: "L⁴ norm" });
    }
    Ok(v)
}

/// J₊(u) = ‖u‖⁴_{Ḣ¹}/‖u‖⁴_{L⁴} for the V₀⁺ field with profile f.
pub fn j_plus(f: &SigmaProfile, spec: &QuadratureSpec) -> Result<f64> {
    j_plus_with(f, &ConvolutionPlan::new(f.grid().clone()), spec)
}

/// [`j_plus`] with a prebuilt convolution plan on the profile's grid.
pub fn j_plus_with(f: &SigmaProfile, plan: &ConvolutionPlan, spec: &QuadratureSpec) -> Result<f64> {
    let h = h1_sq_profile(f, spec)?;
    if h == 0.0 {
        return Err(HwError::ZeroField);
    }
    let l = l4_fourth_v0(f, plan, spec)?;
    Ok(h * h / l)
}

/// J_β(u) = ⟨−(Δ_ℍ + βD_s)u, u⟩² / ‖u‖⁴_{L⁴}, with the L⁴ norm taken on the synthesis grid.
pub fn j_beta(u: &BandField, beta: f64, template: &GridField, spec: &QuadratureSpec) -> Result<f64> {
    let q = quad_form_beta(u, beta, spec)?;
    if q == 0.0 {
        return Err(HwError::ZeroField);
    }
    let l = l4_norm_grid(&synthesize(u, template)?)?;
    Ok(q * q / l.powi(4))
}

/// δ(u) = |‖u‖²_{Ḣ¹} − I₊| + |‖u‖⁴_{L⁴} − I₊| for a V₀⁺ profile.
pub fn delta_gap(f: &SigmaProfile, plan: &ConvolutionPlan, spec: &QuadratureSpec) -> Result<f64> {
    let h = h1_sq_profile(f, spec)?;
    let l = l4_fourth_v0(f, plan, spec)?;
    Ok((h - I_PLUS).abs() + (l - I_PLUS).abs())
}

/// δ(u) for a band field, with the L⁴ norm taken on the synthesis grid.
pub fn delta_gap_bands(u: &BandField, template: &GridField, spec: &QuadratureSpec) -> Result<f64> {
    let h = hk_norm(u, 1, spec)?.powi(2);
    let l = l4_norm_grid(&synthesize(u, template)?)?.powi(4);
    Ok((h - I_PLUS).abs() + (l - I_PLUS).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{ClosedForm, ExpTerm, SigmaGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn grid() -> Arc<SigmaGrid> {
        Arc::new(SigmaGrid::default_grid())
    }

    fn exponential(k: C64, alpha: f64) -> SigmaProfile {
        SigmaProfile::from_closed(grid(), ClosedForm::Exponential { k, alpha }).unwrap()
    }

    #[test]
    fn j_plus_on_exponentials() {
        let plan = ConvolutionPlan::new(grid());
        let q = exponential(C64::new(2.0 * PI, 0.0), 1.0);
        assert!((j_plus_with(&q, &plan, &spec()).unwrap() - I_PLUS).abs() < 1e-10 * I_PLUS);
        let e = exponential(C64::new(1.0, 0.0), 1.0);
        assert!((j_plus_with(&e, &plan, &spec()).unwrap() - I_PLUS).abs() < 1e-10 * I_PLUS);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let k = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let f = exponential(k, rng.random_range(0.5..2.0));
            let j = j_plus_with(&f, &plan, &spec()).unwrap();
            assert!((j - I_PLUS).abs() < 1e-10 * I_PLUS, "{j}");
        }
        let z = SigmaProfile::zero(grid());
        assert_eq!(j_plus_with(&z, &plan, &spec()), Err(HwError::ZeroField));
    }

    #[test]
    fn j_plus_bounded_below_on_random_profiles() {
        let plan = ConvolutionPlan::new(grid());
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let terms = (0..3)
                .map(|_| ExpTerm {
                    coeff: C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    power: rng.random_range(0..3),
                    rate: C64::new(rng.random_range(0.7..2.0), rng.random_range(-1.0..1.0)),
                })
                .collect();
            let f = SigmaProfile::from_closed(grid(), ClosedForm::ExpPoly { terms }).unwrap();
            assert!(j_plus_with(&f, &plan, &spec()).unwrap() >= I_PLUS * (1.0 - 1e-10));
        }
    }

    #[test]
    fn symmetry_examples() {
        let f = SigmaProfile::from_closed(
            grid(),
            ClosedForm::ExpPoly {
                terms: vec![ExpTerm {
                    coeff: C64::new(1.0, 0.3),
                    power: 1,
                    rate: C64::new(1.2, 0.1),
                }],
            },
        )
        .unwrap();
        let plan = ConvolutionPlan::new(grid());
        let exact = 1.0 / (16.0 * PI * PI);
        let e = exponential(C64::new(1.0, 0.0), 1.0);
        assert!((l4_fourth_v0(&e, &plan, &spec()).unwrap() - exact).abs() < 1e-12 * exact);
        let grid_route = l4_fourth_v0(&e.clone().into_sampled(), &plan, &spec()).unwrap();
        assert!((grid_route - exact).abs() < 1e-7 * exact);
        let id = apply_symmetry_profile(&SymmetryParams::identity(), &f, Sign::Plus).unwrap();
        for (a, b) in id.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-15);
        }
        let neg = apply_symmetry_profile(&SymmetryParams::new(0.0, PI, 1.0).unwrap(), &f, Sign::Minus).unwrap();
        for (a, b) in neg.values().iter().zip(f.values()) {
            assert!((a + b).norm() < 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let j0 = j_plus_with(&f, &plan, &spec()).unwrap();
        for _ in 0..5 {
            let p = SymmetryParams::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..6.0),
                rng.random_range(0.7..1.4),
            )
            .unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let g = apply_symmetry_profile(&p, &f, sign).unwrap();
                assert!((g.l2_sq(&spec()).unwrap() - f.l2_sq(&spec()).unwrap()).abs() < 1e-12);
                let back = apply_symmetry_profile(&p.inverse(), &g, sign).unwrap();
                for (a, b) in back.values().iter().zip(f.values()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
            let g = apply_symmetry_profile(&p, &f, Sign::Plus).unwrap();
            assert!((j_plus_with(&g, &plan, &spec()).unwrap() - j0).abs() < 1e-10 * j0);
        }
        assert!(SymmetryParams::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn sampled_symmetry_matches_closed_form() {
        let f = exponential(C64::new(1.0, 0.0), 1.0);
        let p = SymmetryParams::new(0.3, 0.2, 1.1).unwrap();
        let exact = apply_symmetry_profile(&p, &f, Sign::Plus).unwrap();
        let sampled = apply_symmetry_profile(&p, &f.clone().into_sampled(), Sign::Plus).unwrap();
        for (s, (a, b)) in grid().nodes().iter().zip(exact.values().iter().zip(sampled.values())) {
            if *s < 10.0 {
                assert!((a - b).norm() < 1e-6, "σ={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn delta_gap_examples() {
        let plan = ConvolutionPlan::new(grid());
        let q = exponential(C64::new(2.0 * PI, 0.0), 1.0);
        assert!(delta_gap(&q, &plan, &spec()).unwrap() < 1e-5);
        let c: f64 = 1.01;
        let qc = exponential(C64::new(2.0 * PI * c, 0.0), 1.0);
        let want = (c * c - 1.0) * I_PLUS + (c.powi(4) - 1.0) * I_PLUS;
        assert!((delta_gap(&qc, &plan, &spec()).unwrap() - want).abs() < 1e-5);
        let p = SymmetryParams::new(0.7, 1.3, 1.0).unwrap();
        let t = apply_symmetry_profile(&p, &qc, Sign::Plus).unwrap();
        let d0 = delta_gap(&qc, &plan, &spec()).unwrap();
        assert!((delta_gap(&t, &plan, &spec()).unwrap() - d0).abs() < 1e-10);
    }

    #[test]
    fn j_beta_on_ground_state() {
        let q = BandField::single(0, Sign::Plus, exponential(C64::new(2.0 * PI, 0.0), 1.0));
        let template = GridField::template(64, 1.0, 16384, 800.0).unwrap();
        for beta in [0.0, 0.5, 0.9] {
            let j = j_beta(&q, beta, &template, &spec()).unwrap();
            let want = (1.0 - beta).powi(2) * I_PLUS;
            assert!((j - want).abs() < 2e-5 * want, "β={beta}: {j} vs {want}");
        }
        let p = SymmetryParams::new(0.4, 0.9, 1.2).unwrap();
        let t = apply_symmetry(&p, &q).unwrap();
        let a = j_beta(&q, 0.5, &template, &spec()).unwrap();
        let b = j_beta(&t, 0.5, &template, &spec()).unwrap();
        assert!((a - b).abs() < 1e-5 * a);
        assert!(delta_gap_bands(&q, &template, &spec()).unwrap() < 1e-3);
    }
}
