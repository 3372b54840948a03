//! Closed forms of F_{Q₊} and its derivatives, and of the Bergman projections of F₁, F₁+F₂, F₁+F₃.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HwError, Result};
use crate::numerics::{log0, C64};

const CAUCHY_SWITCH: f64 = 0.05;
const CAUCHY_RADIUS: f64 = 0.1;
const CAUCHY_POINTS: usize = 64;

/// Named holomorphic functions on ℂ₊ with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatalogEntry {
    /// F_{Q₊}(z) = i√2/(z+i).
    FQ,
    /// F_{Q₊}′.
    FQPrime,
    /// F_{Q₊}″.
    FQSecond,
    /// F̃ = F_{Q₊}′ + iF_{Q₊}″.
    FTilde,
    /// P₀F₁.
    P0F1,
    /// P₀(F₁ + F₂).
    P0F12,
    /// P₀(F₁ + F₃).
    P0F13,
    /// P₀F₂ = P₀(F₁ + F₂) − P₀F₁.
    P0F2,
    /// P₀F₃ = P₀(F₁ + F₃) − P₀F₁.
    P0F3,
}

impl CatalogEntry {
    /// All entries.
    pub const ALL: [CatalogEntry; 9] = [
        CatalogEntry::FQ,
        CatalogEntry::FQPrime,
        CatalogEntry::FQSecond,
        CatalogEntry::FTilde,
        CatalogEntry::P0F1,
        CatalogEntry::P0F12,
        CatalogEntry::P0F13,
        CatalogEntry::P0F2,
        CatalogEntry::P0F3,
    ];

    /// Canonical name.
    pub fn name(self) -> &'static str {
        match self {
            CatalogEntry::FQ => "F_Q",
            CatalogEntry::FQPrime => "F_Q'",
            CatalogEntry::FQSecond => "F_Q''",
            CatalogEntry::FTilde => "F_tilde",
            CatalogEntry::P0F1 => "P0F1",
            CatalogEntry::P0F12 => "P0F12",
            CatalogEntry::P0F13 => "P0F13",
            CatalogEntry::P0F2 => "P0F2",
            CatalogEntry::P0F3 => "P0F3",
        }
    }

    fn is_projection(self) -> bool {
        matches!(
            self,
            CatalogEntry::P0F1 | CatalogEntry::P0F12 | CatalogEntry::P0F13 | CatalogEntry::P0F2 | CatalogEntry::P0F3
        )
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CatalogEntry {
    type Err = HwError;

    fn from_str(s: &str) -> Result<Self> {
        CatalogEntry::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| HwError::InvalidInput(format!("unknown catalog entry {s:?}")))
    }
}

/// Roots x± = z ± √(z²+1) with |x₊| ≥ |x₋|, computed as x₋ = −1/x₊, and the matching root.
///
/// The closed forms are invariant under exchanging the two roots together with the sign of
/// the square root, so the branch of √(z²+1) does not matter.
fn roots(z: C64) -> (C64, C64, C64) {
    let r = (z * z + 1.0).sqrt();
    let (a, b) = (z + r, z - r);
    let (xp, r) = if b.norm() > a.norm() { (b, -r) } else { (a, r) };
    (xp, -1.0 / xp, r)
}

fn logs(xp: C64, xm: C64) -> Result<(C64, C64)> {
    Ok((log0(xp)?, log0(xm)?))
}

fn p0f1_direct(z: C64) -> Result<C64> {
    let i = C64::i();
    let (xp, xm, r) = roots(z);
    let (lp, lm) = logs(xp, xm)?;
    let r3 = r * r * r;
    let zm = z - i;
    let v = -i * ((z + i) * xm - 2.0 * i * z) / (zm * r3) * lp
        + i * ((z + i) * xp - 2.0 * i * z) / (zm * r3) * lm
        + PI / (zm * zm)
        + 2.0 * i / (z * z + 1.0);
    Ok(-v / PI)
}

fn p0f12_direct(z: C64) -> Result<C64> {
    let i = C64::i();
    let (xp, xm, r) = roots(z);
    let (lp, lm) = logs(xp, xm)?;
    let zp2 = (z + i) * (z + i);
    let zm = z - i;
    let v = -2.0 * (z - 2.0 * i) / (3.0 * zm * zp2) - (1.0 + 2.0 * i * z) * (lp - lm) / (3.0 * zm * zp2 * r);
    Ok(v * 2.0 / (i * PI))
}

fn p0f13_direct(z: C64) -> Result<C64> {
    let i = C64::i();
    let (xp, xm, r) = roots(z);
    let (lp, lm) = logs(xp, xm)?;
    let zm2 = (z - i) * (z - i);
    let v = 2.0 * (z + 2.0 * i) / (zm2 * (z + i)) + (1.0 - 2.0 * i * z) * (lp - lm) / (zm2 * (z + i) * r);
    Ok(v * (-2.0) / (i * PI))
}

fn projection_direct(entry: CatalogEntry, z: C64) -> Result<C64> {
    match entry {
        CatalogEntry::P0F1 => p0f1_direct(z),
        CatalogEntry::P0F12 => p0f12_direct(z),
        CatalogEntry::P0F13 => p0f13_direct(z),
        CatalogEntry::P0F2 => Ok(p0f12_direct(z)? - p0f1_direct(z)?),
        CatalogEntry::P0F3 => Ok(p0f13_direct(z)? - p0f1_direct(z)?),
        _ => unreachable!("not a projection entry"),
    }
}

/// Evaluates a catalog entry at z ∈ ℂ₊.
///
/// The projection formulas have a removable singularity at z = i; within 0.05 of i they are
/// evaluated by the Cauchy integral over the circle of radius 0.1 about i. The point z = i
/// itself is rejected with [`HwError::BranchError`], since both roots x± degenerate there.
pub fn catalog_eval(entry: CatalogEntry, z: C64) -> Result<C64> {
    if !(z.im > 0.0) || !z.is_finite() {
        return Err(HwError::DomainError(format!("{entry} needs Im z > 0, got {z}")));
    }
    let i = C64::i();
    let s2 = 2f64.sqrt();
    let w = z + i;
    match entry {
        CatalogEntry::FQ => return Ok(i * s2 / w),
        CatalogEntry::FQPrime => return Ok(-i * s2 / (w * w)),
        CatalogEntry::FQSecond => return Ok(2.0 * i * s2 / (w * w * w)),
        CatalogEntry::FTilde => return Ok(-i * s2 / (w * w) + i * (2.0 * i * s2) / (w * w * w)),
        _ => {}
    }
    debug_assert!(entry.is_projection());
    if z == i {
        return Err(HwError::BranchError(format!("{entry} is evaluated away from z = i")));
    }
    if (z - i).norm() >= CAUCHY_SWITCH {
        return projection_direct(entry, z);
    }
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..CAUCHY_POINTS {
        let e = C64::from_polar(1.0, 2.0 * PI * m as f64 / CAUCHY_POINTS as f64);
        let p = i + CAUCHY_RADIUS * e;
        acc += projection_direct(entry, p)? * CAUCHY_RADIUS * e / (p - z);
    }
    Ok(acc / CAUCHY_POINTS as f64)
}

/// F₁(z) = 1/(|z+i|(z+i)).
pub fn f1(z: C64) -> C64 {
    let w = z + C64::i();
    1.0 / (w.norm() * w)
}

/// F₂(z) = F₁(z)(2i/(z+i) − 1).
pub fn f2(z: C64) -> C64 {
    let i = C64::i();
    f1(z) * (2.0 * i / (z + i) - 1.0)
}

/// F₃(z) = F₁(z)(−2i/(z̄−i) − 1).
pub fn f3(z: C64) -> C64 {
    let i = C64::i();
    f1(z) * (-2.0 * i / (z.conj() - i) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in CatalogEntry::ALL {
            assert_eq!(e.name().parse::<CatalogEntry>().unwrap(), e);
        }
        assert!("P0F4".parse::<CatalogEntry>().is_err());
    }

    #[test]
    fn limiting_profile_values_at_i() {
        let i = C64::i();
        let s2 = 2f64.sqrt();
        assert!((catalog_eval(CatalogEntry::FQ, i).unwrap() - 1.0 / s2).norm() < 1e-15);
        assert!((catalog_eval(CatalogEntry::FQPrime, i).unwrap() - i / (2.0 * s2)).norm() < 1e-15);
        assert!((catalog_eval(CatalogEntry::FQSecond, i).unwrap() + 1.0 / (2.0 * s2)).norm() < 1e-15);
    }

    #[test]
    fn projections_are_continuous_through_i() {
        let i = C64::i();
        for e in [CatalogEntry::P0F1, CatalogEntry::P0F12, CatalogEntry::P0F13] {
            let inside = catalog_eval(e, i + C64::new(0.049, 0.0)).unwrap();
            let outside = catalog_eval(e, i + C64::new(0.051, 0.0)).unwrap();
            let center = catalog_eval(e, i + C64::new(0.0, 1e-3)).unwrap();
            assert!((inside - outside).norm() < 0.05 * center.norm(), "{e}");
            let a = catalog_eval(e, i + C64::new(0.0499, 0.0)).unwrap();
            let b = projection_direct(e, i + C64::new(0.0499, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm(), "{e}: {a} vs {b}");
        }
    }

    #[test]
    fn branch_choice_is_immaterial() {
        // Evaluate with the other root of z² + 1 by hand at a point on the imaginary axis.
        let z = C64::new(0.0, 3.0);
        let i = C64::i();
        let r = -(z * z + 1.0).sqrt();
        let (xp, xm) = (z + r, z - r);
        let v = -i * ((z + i) * xm - 2.0 * i * z) / ((z - i) * r.powu(3)) * log0(xp).unwrap()
            + i * ((z + i) * xp - 2.0 * i * z) / ((z - i) * r.powu(3)) * log0(xm).unwrap()
            + PI / ((z - i) * (z - i))
            + 2.0 * i / (z * z + 1.0);
        assert!((-v / PI - catalog_eval(CatalogEntry::P0F1, z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn rejects_lower_half_plane_and_branch_point() {
        assert!(matches!(
            catalog_eval(CatalogEntry::P0F1, C64::new(0.0, -1.0)),
            Err(HwError::DomainError(_))
        ));
        assert!(matches!(
            catalog_eval(CatalogEntry::P0F13, C64::i()),
            Err(HwError::BranchError(_))
        ));
    }
}
