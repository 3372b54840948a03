//! Euler Gamma on the positive axis and the positive determination of the logarithm.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{HwError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler Gamma function for real `x > 0` (Lanczos approximation, g = 7).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(HwError::DomainError(format!("gamma requires a finite x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1 − x)), with 1 − x in (1/2, 1).
        return Ok(PI / ((PI * x).sin() * lanczos(1.0 - x)));
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Positive determination of the logarithm: log|z| + i·arg z with arg z ∈ [0, 2π).
pub fn log0(z: C64) -> Result<C64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(HwError::DomainError("log0 is undefined at 0".into()));
    }
    let mut arg = z.im.atan2(z.re);
    if arg < 0.0 {
        arg += 2.0 * PI;
    }
    Ok(C64::new(z.norm().ln(), arg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_classical_values() {
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    /// Independent oracle: Stirling series with recurrence shift to x + 12.
    fn stirling(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut y = x;
        while y < 20.0 {
            shift *= y;
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series =
            inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
        let lg = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series;
        lg.exp() / shift
    }

    #[test]
    fn gamma_matches_stirling_reference() {
        for &x in &[0.995, 0.025, 0.3, 0.5005, 0.95, 1.05, 1.5, 2.7] {
            let g = gamma(x).unwrap();
            let r = stirling(x);
            assert!(((g - r) / r).abs() < 1e-12, "x={x}: {g} vs {r}");
        }
    }

    #[test]
    fn log0_examples() {
        let l = log0(C64::new(-1.0, 0.0)).unwrap();
        assert!(l.re.abs() < 1e-15 && (l.im - PI).abs() < 1e-15);
        let l = log0(C64::new(0.0, -1.0)).unwrap();
        assert!((l.im - 1.5 * PI).abs() < 1e-15);
        let l = log0(C64::new(std::f64::consts::E, 0.0)).unwrap();
        assert!((l.re - 1.0).abs() < 1e-15 && l.im == 0.0);
        assert!(log0(C64::new(0.0, 0.0)).is_err());
    }
}
