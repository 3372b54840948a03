//! The linearized operator 𝓛h = D_sh − 2Π₀⁺(|Q₊|²h) − Π₀⁺(Q₊²h̄) on V₀⁺, its action on the
//! four-dimensional space V spanned by the symmetry directions, the pairings with Q₊ and ∂ₛQ₊,
//! the quadratic form (𝓛h, h), and the sphere picture through the Cayley transform.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{HwError, Result};
use crate::heisenberg::{cayley, HPoint};
use crate::numerics::{QuadratureSpec, C64};
use crate::spectral::{ClosedForm, ConvolutionPlan, ExpTerm, SigmaGrid, SigmaProfile, Sign, UhpCubature};
use crate::variational::{apply_symmetry_profile, SymmetryParams};

fn exp_poly(terms: &[(C64, u32)]) -> ClosedForm {
    ClosedForm::ExpPoly {
        terms: terms
            .iter()
            .map(|&(coeff, power)| ExpTerm {
                coeff,
                power,
                rate: C64::new(1.0, 0.0),
            })
            .collect(),
    }
}

/// Profile 2πe^{−σ} of Q₊.
pub fn qplus_profile(grid: Arc<SigmaGrid>) -> Result<SigmaProfile> {
    SigmaProfile::from_closed(grid, exp_poly(&[(C64::new(2.0 * PI, 0.0), 0)]))
}

/// Profile 2πiσe^{−σ} of ∂ₛQ₊.
pub fn ds_qplus_profile(grid: Arc<SigmaGrid>) -> Result<SigmaProfile> {
    SigmaProfile::from_closed(grid, exp_poly(&[(C64::new(0.0, 2.0 * PI), 1)]))
}

/// ‖h‖²_{Ḣ¹} = ½∫|f|² for a V₀⁺ profile f, exact for closed forms.
pub fn h1_norm_sq(f: &SigmaProfile) -> f64 {
    match f.closed_form() {
        Some(c) => 0.5 * c.l2_sq(),
        None => 0.5 * f.nodal_sum(|_, v| C64::new(v.norm_sqr(), 0.0)).re,
    }
}

/// Real Ḣ¹ inner product Re ½∫f ḡ.
pub fn h1_inner(f: &SigmaProfile, g: &SigmaProfile) -> Result<f64> {
    if let (Some(a), Some(b)) = (f.closed_form(), g.closed_form()) {
        if let (Some(p), Some(m)) = (a.add(b), a.add(&b.scale(C64::new(-1.0, 0.0)))) {
            return Ok(0.125 * (p.l2_sq() - m.l2_sq()));
        }
    }
    if f.grid().nodes() != g.grid().nodes() {
        return Err(HwError::InvalidInput("profiles live on different grids".into()));
    }
    let grid = f.grid();
    Ok(0.5
        * grid
            .weights()
            .iter()
            .zip(f.values().iter().zip(g.values()))
            .map(|(w, (a, b))| w * (a * b.conj()).re)
            .sum::<f64>())
}

/// ‖g‖²_{Ḣ⁻¹} = ½∫|g|²/σ² for the profile of a V₀⁺ distribution.
pub fn hm1_norm_sq(g: &SigmaProfile) -> f64 {
    0.5 * g.nodal_sum(|s, v| C64::new(v.norm_sqr() / (s * s), 0.0)).re
}

/// L² pairing Re ∫ g f̄ dσ/(2σ) of an Ḣ⁻¹ profile g with an Ḣ¹ profile f.
pub fn dual_pairing(g: &SigmaProfile, f: &SigmaProfile) -> Result<f64> {
    if f.grid().nodes() != g.grid().nodes() {
        return Err(HwError::InvalidInput("profiles live on different grids".into()));
    }
    let grid = g.grid();
    Ok(grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(g.values().iter().zip(f.values()))
        .map(|((s, w), (a, b))| w * (a * b.conj()).re / (2.0 * s))
        .sum())
}

/// The operator 𝓛 on one σ-grid, with Q₊ and its convolution square precomputed.
#[derive(Debug, Clone)]
pub struct LinearizedLimit {
    plan: ConvolutionPlan,
    q: Vec<C64>,
    qq: Vec<C64>,
}

impl LinearizedLimit {
    /// Operator on `grid`.
    pub fn new(grid: Arc<SigmaGrid>) -> Result<Self> {
        let plan = ConvolutionPlan::new(grid.clone());
        let q = qplus_profile(grid)?.values().to_vec();
        let qq = plan.convolve(&q, &q);
        Ok(Self { plan, q, qq })
    }

    /// Operator on the default grid.
    pub fn default_grid() -> Result<Self> {
        Self::new(Arc::new(SigmaGrid::default_grid()))
    }

    /// The σ-grid.
    pub fn grid(&self) -> &Arc<SigmaGrid> {
        self.plan.grid()
    }

    /// Profile of 𝓛h, formed from σ-convolutions on the grid.
    pub fn apply(&self, h: &SigmaProfile) -> Result<SigmaProfile> {
        if h.grid().nodes() != self.grid().nodes() {
            return Err(HwError::InvalidInput(
                "profile and operator live on different grids".into(),
            ));
        }
        let f = h.values();
        let qh = self.plan.convolve(&self.q, f);
        let a = self.plan.project(&qh, &self.q);
        let b = self.plan.project(&self.qq, f);
        let values = self
            .grid()
            .nodes()
            .iter()
            .zip(f)
            .zip(a.iter().zip(&b))
            .map(|((s, v), (a, b))| s * v - 2.0 * a - b)
            .collect();
        SigmaProfile::sampled(self.grid().clone(), values)
    }

    /// ‖𝓛h‖_{Ḣ⁻¹}/‖h‖_{Ḣ¹}.
    pub fn relative_residual(&self, h: &SigmaProfile) -> Result<f64> {
        let n = h1_norm_sq(h);
        if n == 0.0 {
            return Err(HwError::ZeroField);
        }
        Ok((hm1_norm_sq(&self.apply(h)?) / n).sqrt())
    }

    /// (𝓛h, h) through [`LinearizedLimit::apply`].
    pub fn form(&self, h: &SigmaProfile) -> Result<f64> {
        dual_pairing(&self.apply(h)?, h)
    }
}

/// The directions Q₊, iQ₊, ∂ₛQ₊, i∂ₛQ₊ and the Ḣ¹-orthogonal basis
/// (∂ₛQ₊, iQ₊ − ∂ₛQ₊, Q₊ + 2i∂ₛQ₊, Q₊) of their span V.
#[derive(Debug, Clone)]
pub struct OrthoBasisV {
    /// Q₊, iQ₊, ∂ₛQ₊, i∂ₛQ₊.
    pub directions: [SigmaProfile; 4],
    /// ∂ₛQ₊, iQ₊ − ∂ₛQ₊, Q₊ + 2i∂ₛQ₊, Q₊.
    pub basis: [SigmaProfile; 4],
}

impl OrthoBasisV {
    /// Both lists as closed-form profiles on `grid`.
    pub fn new(grid: Arc<SigmaGrid>) -> Result<Self> {
        let i = C64::i();
        let q = qplus_profile(grid.clone())?;
        let d = ds_qplus_profile(grid)?;
        let one = C64::new(1.0, 0.0);
        let directions = [q.clone(), q.scale(i), d.clone(), d.scale(i)];
        let basis = [
            d.clone(),
            SigmaProfile::lin_comb(i, &q, -one, &d)?,
            SigmaProfile::lin_comb(one, &q, 2.0 * i, &d)?,
            q,
        ];
        Ok(Self { directions, basis })
    }

    /// Largest |⟨b_a, b_b⟩_{Ḣ¹}|/(‖b_a‖‖b_b‖) over a ≠ b.
    pub fn orthogonality_defect(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in a + 1..4 {
                let ip = h1_inner(&self.basis[a], &self.basis[b])?;
                let n = (h1_norm_sq(&self.basis[a]) * h1_norm_sq(&self.basis[b])).sqrt();
                worst = worst.max(ip.abs() / n);
            }
        }
        Ok(worst)
    }

    /// Real coordinates of a profile along the basis, by Ḣ¹ projection.
    pub fn coordinates(&self, f: &SigmaProfile) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (o, b) in out.iter_mut().zip(&self.basis) {
            *o = h1_inner(f, b)? / h1_norm_sq(b);
        }
        Ok(out)
    }
}

/// Matrix of 𝓛 on V in the orthogonal basis: column j holds the coordinates of 𝓛b_j.
pub fn matrix_on_v(op: &LinearizedLimit, v: &OrthoBasisV) -> Result<Matrix4<f64>> {
    let mut m = Matrix4::zeros();
    for (j, b) in v.basis.iter().enumerate() {
        let c = v.coordinates(&op.apply(b)?)?;
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    Ok(m)
}

/// c₀ = √2π²F_h(i) = ⟨h, Q₊⟩_{Ḣ¹} and c₁ = −√2π²F_h′(i) = ⟨h, ∂ₛQ₊⟩_{Ḣ¹}, complex.
pub fn pairing_functionals(h: &SigmaProfile, spec: &QuadratureSpec) -> Result<(C64, C64)> {
    let (f, d) = h.holo_with_derivative(C64::i(), spec)?;
    let k = 2f64.sqrt() * PI * PI;
    Ok((k * f, -k * d))
}

/// Values of F_h = (1/(π√2))∫e^{izσ}f at the cubature points: exact for closed forms, nodal
/// sums on the grid otherwise.
pub fn holo_on_rule(h: &SigmaProfile, rule: &UhpCubature) -> Vec<C64> {
    let c = 1.0 / (PI * 2f64.sqrt());
    let i = C64::i();
    match h.closed_form() {
        Some(form) => rule.points().iter().map(|&z| form.holo_with_derivative(z).0).collect(),
        None => rule
            .points()
            .iter()
            .map(|&z| c * h.nodal_sum(|s, v| (i * z * s).exp() * v))
            .collect(),
    }
}

/// Relative size of c₀ above which [`quadratic_form_l`] refuses a profile.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// (𝓛h, h) = ‖h‖²_{Ḣ¹} − 2π∫_{ℂ₊}|F_{Q₊}|²|F_h|² for h Ḣ¹-orthogonal to Q₊ and iQ₊.
pub fn quadratic_form_l(h: &SigmaProfile, rule: &UhpCubature, spec: &QuadratureSpec) -> Result<f64> {
    let n = h1_norm_sq(h);
    let (c0, _) = pairing_functionals(h, spec)?;
    let tol = ORTHOGONALITY_TOLERANCE * PI * n.sqrt();
    if c0.norm() > tol {
        return Err(HwError::OrthogonalityViolation {
            pairing: c0.norm(),
            tolerance: tol,
        });
    }
    Ok(n - 2.0 * PI * weighted_l2(h, rule))
}

/// ∫_{ℂ₊}|F_{Q₊}|²|F_h|² on `rule`.
fn weighted_l2(h: &SigmaProfile, rule: &UhpCubature) -> f64 {
    let fh = holo_on_rule(h, rule);
    rule.points()
        .iter()
        .zip(rule.weights())
        .zip(&fh)
        .map(|((z, w), f)| w * 2.0 / (z + C64::i()).norm_sqr() * f.norm_sqr())
        .sum()
}

/// Functions on S³ whose pullbacks are tested against the sphere spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SphereMode {
    /// v = 1.
    One,
    /// v = ζ̄₂.
    Zeta2Bar,
    /// v = ζ₂.
    Zeta2,
    /// v = 2|ζ₂|² − 1.
    Zonal,
}

impl SphereMode {
    /// All four modes.
    pub const ALL: [SphereMode; 4] = [
        SphereMode::One,
        SphereMode::Zeta2Bar,
        SphereMode::Zeta2,
        SphereMode::Zonal,
    ];

    /// λ_jλ_k with λ_j = j + ½.
    pub fn expected(self) -> f64 {
        match self {
            SphereMode::One => 0.25,
            SphereMode::Zeta2Bar | SphereMode::Zeta2 => 0.75,
            SphereMode::Zonal => 2.25,
        }
    }

    fn eval(self, zeta2: C64) -> C64 {
        match self {
            SphereMode::One => C64::new(1.0, 0.0),
            SphereMode::Zeta2Bar => zeta2.conj(),
            SphereMode::Zeta2 => zeta2,
            SphereMode::Zonal => C64::new(2.0 * zeta2.norm_sqr() - 1.0, 0.0),
        }
    }
}

/// h = √2|Q₊|·(v∘𝒞) as a function of (r², s).
pub fn sphere_pullback(mode: SphereMode, r2: f64, s: f64) -> C64 {
    let q = 2f64.sqrt() / C64::new(s, r2 + 1.0).norm();
    let zeta = cayley(HPoint::new(r2.max(0.0).sqrt(), 0.0, s)).zeta2;
    let zeta2 = if r2 >= 0.0 {
        zeta
    } else {
        C64::new(1.0 - r2, -s) / C64::new(1.0 + r2, s)
    };
    2f64.sqrt() * q * mode.eval(zeta2)
}

/// Rayleigh quotient ½⟨−Δ_ℍh, h⟩ / ∫|h|²|Q₊|² of the pullback of `mode`.
///
/// For radial h(r², s), ⟨−Δ_ℍh, h⟩ = π∫∫ r²(|∂_{r²}h|² + |∂ₛh|²) d(r²) ds; derivatives are
/// central differences and the half-plane integrals use `rule`.
pub fn sphere_eigencheck(mode: SphereMode, rule: &UhpCubature) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (z, w) in rule.points().iter().zip(rule.weights()) {
        let (s, r2) = (z.re, z.im);
        let h = 1e-5 * (1.0 + z.norm());
        let dr = (sphere_pullback(mode, r2 + h, s) - sphere_pullback(mode, r2 - h, s)) / (2.0 * h);
        let ds = (sphere_pullback(mode, r2, s + h) - sphere_pullback(mode, r2, s - h)) / (2.0 * h);
        let v = sphere_pullback(mode, r2, s);
        let q2 = 2.0 / C64::new(s, r2 + 1.0).norm_sqr();
        num += w * r2 * (dr.norm_sqr() + ds.norm_sqr());
        den += w * v.norm_sqr() * q2;
    }
    0.5 * num / den
}

/// Jacobian at (0, 0, 1) of (s₀, θ, α) ↦ ((Tu, ∂ₛQ₊), (Tu, iQ₊), (Tu, Q₊ + 2i∂ₛQ₊))_{Ḣ¹} with
/// u = Q₊, by central differences of exact closed-form inner products. Row i is the pairing,
/// column j the parameter.
pub fn symmetry_jacobian(grid: Arc<SigmaGrid>) -> Result<[[f64; 3]; 3]> {
    let v = OrthoBasisV::new(grid.clone())?;
    let q = qplus_profile(grid)?;
    let targets = [v.basis[0].clone(), v.directions[1].clone(), v.basis[2].clone()];
    let g = |p: SymmetryParams| -> Result<[f64; 3]> {
        let t = apply_symmetry_profile(&p, &q, Sign::Plus)?;
        Ok([
            h1_inner(&t, &targets[0])?,
            h1_inner(&t, &targets[1])?,
            h1_inner(&t, &targets[2])?,
        ])
    };
    let h = 1e-5;
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut plus = [0.0, 0.0, 1.0];
        let mut minus = [0.0, 0.0, 1.0];
        plus[j] += h;
        minus[j] -= h;
        let gp = g(SymmetryParams::new(plus[0], plus[1], plus[2])?)?;
        let gm = g(SymmetryParams::new(minus[0], minus[1], minus[2])?)?;
        for i in 0..3 {
            jac[i][j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Gram matrix of (∂ₛQ₊, iQ₊, Q₊ + 2i∂ₛQ₊) in the real Ḣ¹ inner product.
pub fn symmetry_gram(grid: Arc<SigmaGrid>) -> Result<[[f64; 3]; 3]> {
    let v = OrthoBasisV::new(grid)?;
    let d = [v.basis[0].clone(), v.directions[1].clone(), v.basis[2].clone()];
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = h1_inner(&d[i], &d[j])?;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (LinearizedLimit, OrthoBasisV) {
        let op = LinearizedLimit::default_grid().unwrap();
        let v = OrthoBasisV::new(op.grid().clone()).unwrap();
        (op, v)
    }

    #[test]
    fn kernel_directions() {
        let (op, v) = setup();
        for b in [&v.basis[0], &v.directions[1], &v.basis[2]] {
            let r = op.relative_residual(b).unwrap();
            assert!(r < 1e-6, "kernel residual {r}");
        }
    }

    #[test]
    fn image_of_the_ground_state() {
        let (op, v) = setup();
        let lq = op.apply(&v.basis[3]).unwrap();
        let want = v.directions[3].scale(C64::new(2.0, 0.0));
        let diff = SigmaProfile::lin_comb(C64::new(1.0, 0.0), &lq, C64::new(-1.0, 0.0), &want.into_sampled()).unwrap();
        let rel = (hm1_norm_sq(&diff) / hm1_norm_sq(&lq)).sqrt();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn matrix_on_v_has_one_nonzero_column() {
        let (op, v) = setup();
        assert!(v.orthogonality_defect().unwrap() < 1e-10);
        let m = matrix_on_v(&op, &v).unwrap();
        let mut want = Matrix4::zeros();
        want[(2, 3)] = 1.0;
        want[(3, 3)] = -1.0;
        assert!((m - want).abs().max() < 1e-6, "{m}");
        let ds = v.coordinates(&v.basis[0]).unwrap();
        let image = m * nalgebra::Vector4::from(ds);
        assert!(image.abs().max() < 1e-6);
    }

    #[test]
    fn matrix_matches_direct_application() {
        let (op, v) = setup();
        let m = matrix_on_v(&op, &v).unwrap();
        let a = [0.3, -1.2, 0.7, 0.4];
        let mut h = v.basis[0].scale(C64::new(a[0], 0.0));
        for k in 1..4 {
            h = SigmaProfile::lin_comb(C64::new(1.0, 0.0), &h, C64::new(a[k], 0.0), &v.basis[k]).unwrap();
        }
        let got = v.coordinates(&op.apply(&h).unwrap()).unwrap();
        let want = m * nalgebra::Vector4::from(a);
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn pairings() {
        let (_, v) = setup();
        let spec = QuadratureSpec::default();
        let (c0, c1) = pairing_functionals(&v.basis[3], &spec).unwrap();
        assert!((c0 - PI * PI).norm() < 1e-12);
        assert!(c1.re.abs() < 1e-12);
        // (σ − 1)e^{−σ} has ∫e^{−σ}f = 1/4 − 1/2 ≠ 0; (2σ − 1)e^{−σ} has ∫e^{−σ}f = 0.
        let f = SigmaProfile::from_closed(
            v.basis[3].grid().clone(),
            exp_poly(&[(C64::new(2.0, 0.0), 1), (C64::new(-1.0, 0.0), 0)]),
        )
        .unwrap();
        let direct = f.integral(|s, v| (-s).exp() * v, &spec, "test").unwrap();
        assert!(direct.norm() < 1e-12);
        let (c0, _) = pairing_functionals(&f, &spec).unwrap();
        assert!(c0.norm() < 1e-12);
        for (a, b) in [(0usize, 3usize), (1, 3), (2, 3)] {
            let (c0, c1) = pairing_functionals(&v.basis[a], &spec).unwrap();
            assert!((c0.re - h1_inner(&v.basis[a], &v.basis[b]).unwrap()).abs() < 1e-12);
            assert!((c1.re - h1_inner(&v.basis[a], &v.basis[0]).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_form_two_routes() {
        let (op, v) = setup();
        let rule = UhpCubature::new(81, 81);
        let spec = QuadratureSpec::default();
        // ∂ₛQ₊ pairs with iQ₊, so the Q₊²h̄ term survives: the guarded form refuses it, and
        // dropping that term misses (𝓛∂ₛQ₊, ∂ₛQ₊) = 0 by exactly −π²/4.
        let d = &v.basis[0];
        assert!(matches!(
            quadratic_form_l(d, &rule, &spec),
            Err(HwError::OrthogonalityViolation { .. })
        ));
        assert!(op.form(d).unwrap().abs() < 1e-6 * h1_norm_sq(d));
        let unguarded = h1_norm_sq(d) - 2.0 * PI * weighted_l2(d, &rule);
        assert!((unguarded + PI * PI / 4.0).abs() < 1e-8);
        let f = SigmaProfile::from_closed(
            op.grid().clone(),
            exp_poly(&[
                (C64::new(1.0, 0.5), 2),
                (C64::new(-0.5, -0.25), 1),
                (C64::new(0.0, 3.0), 3),
            ]),
        )
        .unwrap();
        let (c0, _) = pairing_functionals(&f, &spec).unwrap();
        // Remove the Q₊ and iQ₊ components.
        let q = &v.basis[3];
        let g = SigmaProfile::lin_comb(C64::new(1.0, 0.0), &f, -c0 / (PI * PI), q).unwrap();
        let a = quadratic_form_l(&g, &rule, &spec).unwrap();
        let b = op.form(&g).unwrap();
        assert!((a - b).abs() < 1e-6 * h1_norm_sq(&g), "{a} vs {b}");
        let g2 = g.scale(C64::new(2.0, 0.0));
        assert!((quadratic_form_l(&g2, &rule, &spec).unwrap() - 4.0 * a).abs() < 1e-10 * a.abs().max(1.0));
        assert!(matches!(
            quadratic_form_l(q, &rule, &spec),
            Err(HwError::OrthogonalityViolation { .. })
        ));
    }

    #[test]
    fn sphere_spectrum() {
        let rule = UhpCubature::new(81, 81);
        for mode in SphereMode::ALL {
            let r = sphere_eigencheck(mode, &rule);
            assert!((r - mode.expected()).abs() < 1e-3, "{mode:?}: {r}");
        }
    }

    #[test]
    fn symmetry_jacobian_is_the_gram_matrix() {
        let grid = Arc::new(SigmaGrid::default_grid());
        let j = symmetry_jacobian(grid.clone()).unwrap();
        let g = symmetry_gram(grid).unwrap();
        let h = PI * PI / 2.0;
        let want = [[h, h, 0.0], [h, 2.0 * h, 0.0], [0.0, 0.0, 2.0 * h]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((g[a][b] - want[a][b]).abs() < 1e-12);
                let sign = if b == 2 { -1.0 } else { 1.0 };
                assert!((j[a][b] - sign * g[a][b]).abs() < 1e-6, "{j:?}");
            }
        }
    }
}
