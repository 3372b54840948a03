//! The Bergman projector P₀ onto A²₁, inner products on ℂ₊ and the rank-corrected projector P_W.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::catalog::{catalog_eval, f1, f2, f3, CatalogEntry};
use super::holo::CPlaneFn;
use crate::error::{HwError, Result};
use crate::numerics::{integrate_uhp, integrate_uhp_centered, QuadratureSpec, C64};
use crate::spectral::UhpCubature;

/// Default order of the graded cubature used for the projection constants (odd, so that no
/// node falls on z = i).
pub const DEFAULT_CUBATURE_ORDER: usize = 81;

/// P₀F(z) = −(1/π) ∫_{ℂ₊} F(w) (z − w̄)^{−2} dλ(w), by adaptive quadrature.
pub fn bergman_project_raw(f: &CPlaneFn, z: C64, spec: &QuadratureSpec) -> Result<C64> {
    if !(z.im > 0.0) || !z.is_finite() {
        return Err(HwError::DomainError(format!(
            "Bergman projection is evaluated on Im z > 0, got {z}"
        )));
    }
    let r = integrate_uhp_centered(
        |w| {
            let d = z - w.conj();
            f.eval(w) / (d * d)
        },
        z.re,
        spec,
    )?;
    Ok(-r.value / PI)
}

/// ⟨F, G⟩ = ∫_{ℂ₊} F Ḡ dλ by adaptive quadrature.
pub fn inner_uhp(f: &CPlaneFn, g: &CPlaneFn, spec: &QuadratureSpec) -> Result<C64> {
    Ok(integrate_uhp(|z| f.eval(z) * g.eval(z).conj(), spec)?.value)
}

/// ⟨F, G⟩ on a fixed cubature rule.
pub fn inner_cubature<F, G>(f: F, g: G, rule: &UhpCubature) -> C64
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    rule.integrate(|z| f(z) * g(z).conj())
}

fn f_j(j: usize) -> Result<fn(C64) -> C64> {
    match j {
        1 => Ok(f1),
        2 => Ok(f2),
        3 => Ok(f3),
        _ => Err(HwError::InvalidInput(format!(
            "F_j is defined for j ∈ {{1,2,3}}, got {j}"
        ))),
    }
}

fn p0_entry(j: usize) -> CatalogEntry {
    match j {
        1 => CatalogEntry::P0F1,
        2 => CatalogEntry::P0F2,
        _ => CatalogEntry::P0F3,
    }
}

fn catalog_on_rule(entry: CatalogEntry, rule: &UhpCubature) -> Result<Vec<C64>> {
    rule.points().iter().map(|&z| catalog_eval(entry, z)).collect()
}

/// ⟨πP₀F_j, F_j⟩ from the closed forms, on a graded cubature of the given odd order.
pub fn p0_inner(j: usize, order: usize) -> Result<f64> {
    let fj = f_j(j)?;
    if order.is_multiple_of(2) {
        return Err(HwError::InvalidInput(format!(
            "cubature order must be odd, got {order}"
        )));
    }
    let rule = UhpCubature::new(order, order);
    let p = catalog_on_rule(p0_entry(j), &rule)?;
    let v: C64 = rule
        .points()
        .iter()
        .zip(rule.weights())
        .zip(&p)
        .map(|((z, w), pv)| *w * pv * fj(*z).conj())
        .sum();
    Ok(PI * v.re)
}

/// The inner products entering the rank-corrected projector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BergmanTable {
    /// ⟨πP₀F_j, F_j⟩, j = 1, 2, 3.
    pub p0_inner: [f64; 3],
    /// ⟨F_j, F_j⟩.
    pub norm_sq: [f64; 3],
    /// ⟨F_j, F_{Q₊}′⟩.
    pub with_fq_prime: [C64; 3],
    /// ⟨F_j, F̃⟩.
    pub with_f_tilde: [C64; 3],
    /// ⟨F̃, F̃⟩.
    pub f_tilde_norm_sq: f64,
    /// ⟨F_{Q₊}′, F_{Q₊}′⟩.
    pub fq_prime_norm_sq: f64,
    /// ⟨F_{Q₊}′, F̃⟩.
    pub fq_prime_f_tilde: C64,
}

impl BergmanTable {
    /// Computes all entries on a graded cubature of the given odd order.
    pub fn compute(order: usize) -> Result<Self> {
        if order.is_multiple_of(2) {
            return Err(HwError::InvalidInput(format!(
                "cubature order must be odd, got {order}"
            )));
        }
        let rule = UhpCubature::new(order, order);
        let fqp = catalog_on_rule(CatalogEntry::FQPrime, &rule)?;
        let ft = catalog_on_rule(CatalogEntry::FTilde, &rule)?;
        let mut table = BergmanTable {
            p0_inner: [0.0; 3],
            norm_sq: [0.0; 3],
            with_fq_prime: [C64::new(0.0, 0.0); 3],
            with_f_tilde: [C64::new(0.0, 0.0); 3],
            f_tilde_norm_sq: 0.0,
            fq_prime_norm_sq: 0.0,
            fq_prime_f_tilde: C64::new(0.0, 0.0),
        };
        let pts = rule.points();
        let wts = rule.weights();
        for j in 1..=3 {
            let fj = f_j(j)?;
            let p = catalog_on_rule(p0_entry(j), &rule)?;
            let (mut a, mut n, mut q, mut t) = (C64::new(0.0, 0.0), 0.0, C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for m in 0..pts.len() {
                let v = fj(pts[m]);
                let w = wts[m];
                a += w * p[m] * v.conj();
                n += w * v.norm_sqr();
                q += w * v * fqp[m].conj();
                t += w * v * ft[m].conj();
            }
            table.p0_inner[j - 1] = PI * a.re;
            table.norm_sq[j - 1] = n;
            table.with_fq_prime[j - 1] = q;
            table.with_f_tilde[j - 1] = t;
        }
        for m in 0..pts.len() {
            table.f_tilde_norm_sq += wts[m] * ft[m].norm_sqr();
            table.fq_prime_norm_sq += wts[m] * fqp[m].norm_sqr();
            table.fq_prime_f_tilde += wts[m] * fqp[m] * ft[m].conj();
        }
        Ok(table)
    }

    /// ⟨P_W F_j, F_j⟩ = ⟨P₀F_j, F_j⟩ − (2/π)|⟨F_j, F_{Q₊}′⟩|² − (4/π)|⟨F_j, F̃⟩|².
    pub fn pw_correction_inner(&self, j: usize) -> Result<f64> {
        if !(1..=3).contains(&j) {
            return Err(HwError::InvalidInput(format!(
                "F_j is defined for j ∈ {{1,2,3}}, got {j}"
            )));
        }
        let i = j - 1;
        Ok((self.p0_inner[i] - 2.0 * self.with_fq_prime[i].norm_sqr() - 4.0 * self.with_f_tilde[i].norm_sqr()) / PI)
    }

    /// 2⟨P_WF₁,F₁⟩/‖F₁‖² + ⟨P_WF₂,F₂⟩/‖F₂‖² + ⟨P_WF₃,F₃⟩/‖F₃‖².
    pub fn coercivity_constant(&self) -> Result<f64> {
        let mut c = 0.0;
        for (j, mult) in [(1, 2.0), (2, 1.0), (3, 1.0)] {
            c += mult * self.pw_correction_inner(j)? / self.norm_sq[j - 1];
        }
        Ok(c)
    }
}

/// ⟨P_W F_j, F_j⟩ on the default cubature.
pub fn pw_correction_inner(j: usize) -> Result<f64> {
    BergmanTable::compute(DEFAULT_CUBATURE_ORDER)?.pw_correction_inner(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::HoloFn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn random_points(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)))
            .collect()
    }

    #[test]
    fn reproducing_property() {
        let spec = QuadratureSpec::new(1e-10, 1e-8);
        let i = C64::i();
        let a = CPlaneFn::new("(z+i)^-2", move |z: C64| 1.0 / ((z + i) * (z + i)));
        let b = CPlaneFn::new("(z+2i)^-3", move |z: C64| 1.0 / (z + 2.0 * i).powu(3));
        let v = bergman_project_raw(&a, 2.0 * i, &spec).unwrap();
        assert!((v + 1.0 / 9.0).norm() < 1e-8);
        for z in random_points(10, 3) {
            for f in [&a, &b] {
                let p = bergman_project_raw(f, z, &spec).unwrap();
                let want = f.eval(z);
                assert!((p - want).norm() < 1e-5 * want.norm(), "{}: {p} vs {want}", f.name());
            }
        }
    }

    #[test]
    fn antiholomorphic_functions_project_to_zero() {
        let spec = QuadratureSpec::new(1e-10, 1e-8);
        let i = C64::i();
        let f = CPlaneFn::new("conj", move |z: C64| 1.0 / ((z.conj() - i) * (z.conj() - i)));
        assert!(bergman_project_raw(&f, 2.0 * i, &spec).unwrap().norm() < 1e-8);
    }

    #[test]
    fn catalog_matches_raw_projection() {
        let spec = QuadratureSpec::new(1e-11, 1e-9);
        let i = C64::i();
        let pairs = [
            (CPlaneFn::f1(), CatalogEntry::P0F1, 2.0 * i),
            (
                CPlaneFn::new("F1+F2", |z| f1(z) + f2(z)),
                CatalogEntry::P0F12,
                C64::new(1.0, 1.0),
            ),
            (CPlaneFn::f3(), CatalogEntry::P0F3, C64::new(-0.5, 0.7)),
        ];
        for (f, e, z) in pairs {
            let raw = bergman_project_raw(&f, z, &spec).unwrap();
            let cat = catalog_eval(e, z).unwrap();
            assert!((raw - cat).norm() < 1e-8 * cat.norm().max(1.0), "{e}: {raw} vs {cat}");
        }
    }

    #[test]
    fn catalog_linearity() {
        for z in random_points(20, 5) {
            let p1 = catalog_eval(CatalogEntry::P0F1, z).unwrap();
            let d2 = catalog_eval(CatalogEntry::P0F12, z).unwrap() - p1;
            let d3 = catalog_eval(CatalogEntry::P0F13, z).unwrap() - p1;
            assert!((d2 - catalog_eval(CatalogEntry::P0F2, z).unwrap()).norm() < 1e-14);
            assert!((d3 - catalog_eval(CatalogEntry::P0F3, z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn projection_is_idempotent_on_catalog() {
        let spec = QuadratureSpec::new(1e-9, 1e-7);
        let f = CPlaneFn::from_holo(HoloFn::Catalog(CatalogEntry::P0F1), spec);
        for z in random_points(2, 8) {
            let p = bergman_project_raw(&f, z, &spec).unwrap();
            let want = f.eval(z);
            assert!((p - want).norm() < 1e-4 * want.norm(), "{p} vs {want}");
        }
    }

    #[test]
    fn inner_products_table() {
        let t = BergmanTable::compute(DEFAULT_CUBATURE_ORDER).unwrap();
        let pi = PI;
        let norms = [pi / 4.0, pi / 8.0, pi / 8.0];
        let fqp = [-2.0 * SQRT2 / 3.0, -2.0 * SQRT2 / 9.0, 2.0 * SQRT2 / 15.0];
        let ftl = [-2.0 * SQRT2 / 15.0, 14.0 * SQRT2 / 45.0, 2.0 * SQRT2 / 35.0];
        for j in 0..3 {
            assert!((t.norm_sq[j] - norms[j]).abs() < 1e-8, "norm {j}: {}", t.norm_sq[j]);
            assert!(
                (t.with_fq_prime[j] - fqp[j]).norm() < 1e-8,
                "F_Q' {j}: {}",
                t.with_fq_prime[j]
            );
            assert!(
                (t.with_f_tilde[j] - ftl[j]).norm() < 1e-8,
                "F~ {j}: {}",
                t.with_f_tilde[j]
            );
        }
        assert!((t.f_tilde_norm_sq - pi / 4.0).abs() < 1e-10);
        assert!((t.fq_prime_norm_sq - pi / 2.0).abs() < 1e-10);
        assert!(t.fq_prime_f_tilde.norm() < 1e-10);
        assert!((t.p0_inner[0] - 2.0).abs() < 1e-9);
        assert!((t.p0_inner[1] - 10.0 / 9.0).abs() < 1e-9);
        assert!((t.p0_inner[2] - 0.1303955989).abs() < 1e-9);
        assert!((t.pw_correction_inner(1).unwrap() - 18.0 / (225.0 * pi)).abs() < 1e-9);
        assert!((t.pw_correction_inner(2).unwrap() - 282.0 / (2025.0 * pi)).abs() < 1e-9);
        let c3 = (0.1303955989 - 16.0 / 225.0 - 32.0 / 1225.0) / pi;
        assert!((t.pw_correction_inner(3).unwrap() - c3).abs() < 1e-9);
        assert!((t.coercivity_constant().unwrap() - 0.2046049976).abs() < 1e-9);
    }

    #[test]
    fn adaptive_inner_product_agrees() {
        let spec = QuadratureSpec::new(1e-11, 1e-9);
        let fq = CPlaneFn::from_holo(HoloFn::Catalog(CatalogEntry::FQPrime), spec);
        let v = inner_uhp(&CPlaneFn::f1(), &fq, &spec).unwrap();
        assert!((v + 2.0 * SQRT2 / 3.0).norm() < 1e-8, "{v}");
        let n = inner_uhp(&CPlaneFn::f2(), &CPlaneFn::f2(), &spec).unwrap();
        assert!(n.im.abs() < 1e-15 && n.re > 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(p0_inner(4, 81).is_err());
        assert!(p0_inner(1, 80).is_err());
        assert!(BergmanTable::compute(80).is_err());
    }
}
