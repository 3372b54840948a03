//! The traveling waves Q_β by Newton iteration on the Laguerre–Galerkin system.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::functionals::I_PLUS;
use super::galerkin::{from_real, to_real, LaguerreGalerkin};
use super::qplus::GroundStateResult;
use crate::error::{HwError, Result};
use crate::numerics::C64;
use crate::spectral::{SigmaGrid, Sign};

/// Settings of the Q_β solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QBetaConfig {
    /// Laguerre functions per band.
    pub nj: usize,
    /// Bands per sign.
    pub nk: usize,
    /// Order of the graded cubature in each direction (odd).
    pub order: usize,
    /// Newton iteration budget.
    pub max_iterations: usize,
    /// Target Euclidean norm of the reduced Newton residual.
    pub tolerance: f64,
}

impl Default for QBetaConfig {
    fn default() -> Self {
        Self {
            nj: 24,
            nk: 8,
            order: 81,
            max_iterations: 40,
            tolerance: 1e-11,
        }
    }
}

/// Output of [`solve_qbeta`].
#[derive(Debug, Clone)]
pub struct QBetaSolution {
    /// The ground state and its diagnostics; `functional_value` is I_β = J_β(Q_β).
    pub result: GroundStateResult,
    /// The Galerkin basis.
    pub basis: Arc<LaguerreGalerkin>,
    /// Galerkin coefficients of Q_β.
    pub coeffs: Vec<C64>,
    /// I_β/(1−β)².
    pub normalized_value: f64,
    /// ‖Q_β‖²_{Ḣ¹}.
    pub h1_sq: f64,
    /// ‖R_β‖_{Ḣ¹} of the part of Q_β outside the (k = 0, σ > 0) band.
    pub r_beta_h1: f64,
    /// δ(Q_β).
    pub delta: f64,
    /// Largest coefficient modulus in the last Laguerre index or the last band, relative to
    /// the largest coefficient.
    pub tail: f64,
}

/// Real coordinates fixed by the gauge: Im c₀ = 0 and c₁ = 0 in the (k = 0, σ > 0) band,
/// equivalently Ḣ¹-orthogonality to iQ₊, ∂ₛQ₊ and Q₊ + 2i∂ₛQ₊.
pub fn gauge_coordinates(basis: &LaguerreGalerkin) -> [usize; 3] {
    let m = basis.dim();
    let i0 = basis.index(Sign::Plus, 0, 0);
    let i1 = basis.index(Sign::Plus, 0, 1);
    [m + i0, i1, m + i1]
}

/// Coordinates kept by the gauge.
pub fn free_coordinates(basis: &LaguerreGalerkin) -> Vec<usize> {
    let fixed = gauge_coordinates(basis);
    (0..2 * basis.dim()).filter(|i| !fixed.contains(i)).collect()
}

/// D = ((2k+1) − εβ)/(2(1 − β)), the symbol of −(Δ_ℍ + βD_s)/(1−β) in the basis.
pub fn operator_diagonal(basis: &LaguerreGalerkin, beta: f64) -> Vec<f64> {
    basis.form_weights(beta).iter().map(|a| a / (1.0 - beta)).collect()
}

/// Galerkin residual D c − (|u|²u, basis) of the stationary equation.
pub fn equation_residual(basis: &LaguerreGalerkin, c: &[C64], beta: f64) -> Vec<C64> {
    let d = operator_diagonal(basis, beta);
    let n = basis.cubic(&basis.synthesize(c));
    c.iter().zip(&n).zip(&d).map(|((c, n), d)| c * *d - n).collect()
}

/// Ḣ⁻¹ norm of a dual coefficient vector.
pub fn dual_norm(basis: &LaguerreGalerkin, f: &[C64]) -> f64 {
    basis
        .h1_weights()
        .iter()
        .zip(f)
        .map(|(w, v)| v.norm_sqr() / w)
        .sum::<f64>()
        .sqrt()
}

/// Ḣ¹ norm of a coefficient vector.
pub fn h1_norm(basis: &LaguerreGalerkin, c: &[C64]) -> f64 {
    basis
        .h1_weights()
        .iter()
        .zip(c)
        .map(|(w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn reduce(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

/// Solves −(Δ_ℍ + βD_s)Q/(1−β) = |Q|²Q on the Galerkin basis.
///
/// Newton's method runs on the gauge slice of [`gauge_coordinates`], starting from `start`
/// (coefficients on the same basis) or from Q₊ = 2πe^{−σ} on the (0, +) band. Steps are
/// halved until the reduced residual decreases.
pub fn solve_qbeta_on(
    basis: Arc<LaguerreGalerkin>,
    beta: f64,
    start: Option<&[C64]>,
    config: &QBetaConfig,
) -> Result<QBetaSolution> {
    if !(0.0..1.0).contains(&beta) {
        return Err(HwError::DomainError(format!("β = {beta} outside [0, 1)")));
    }
    let m = basis.dim();
    let mut c = match start {
        Some(s) if s.len() == m => s.to_vec(),
        Some(s) => {
            return Err(HwError::InvalidInput(format!(
                "start has {} coefficients, basis has {m}",
                s.len()
            )));
        }
        None => {
            let mut c = vec![C64::new(0.0, 0.0); m];
            c[basis.index(Sign::Plus, 0, 0)] = C64::new(2f64.sqrt() * PI, 0.0);
            c
        }
    };
    for &i in &gauge_coordinates(&basis) {
        if i < m {
            c[i].re = 0.0;
        } else {
            c[i - m].im = 0.0;
        }
    }
    let d = operator_diagonal(&basis, beta);
    let free = free_coordinates(&basis);
    let reduced_norm = |c: &[C64]| reduce(&to_real(&equation_residual(&basis, c, beta)), &free).norm();
    let mut res = reduced_norm(&c);
    let mut iterations = 0;
    while res > config.tolerance {
        if iterations >= config.max_iterations {
            return Err(HwError::NoConvergence {
                what: "solve_qbeta",
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let u = basis.synthesize(&c);
        let jr = basis.linearized_real(&u, &d);
        let jred = DMatrix::from_fn(free.len(), free.len(), |a, b| jr[(free[a], free[b])]);
        let f = reduce(&to_real(&equation_residual(&basis, &c, beta)), &free);
        let dx = jred.lu().solve(&(-f)).ok_or(HwError::SingularSystem(0.0))?;
        let x = to_real(&c);
        let mut lambda = 1.0;
        loop {
            let mut xn = x.clone();
            for (a, &i) in free.iter().enumerate() {
                xn[i] += lambda * dx[a];
            }
            let cn = from_real(&xn);
            let rn = reduced_norm(&cn);
            if rn < res || lambda < 1e-4 {
                c = cn;
                res = rn;
                break;
            }
            lambda *= 0.5;
        }
    }
    finish(basis, beta, c, iterations)
}

fn finish(basis: Arc<LaguerreGalerkin>, beta: f64, c: Vec<C64>, iterations: usize) -> Result<QBetaSolution> {
    let u = basis.synthesize(&c);
    let l4 = basis.l4_fourth(&u);
    let a = basis.form_weights(beta);
    let q: f64 = a.iter().zip(&c).map(|(a, v)| a * v.norm_sqr()).sum();
    let residual = dual_norm(&basis, &equation_residual(&basis, &c, beta));
    let w = basis.h1_weights();
    let h1_sq: f64 = w.iter().zip(&c).map(|(w, v)| w * v.norm_sqr()).sum();
    let v0: f64 = (0..basis.nj())
        .map(|j| {
            let i = basis.index(Sign::Plus, 0, j);
            w[i] * c[i].norm_sqr()
        })
        .sum();
    let cmax = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tail = (0..c.len())
        .filter(|&m| {
            let (_, k, j) = basis.label(m);
            j == basis.nj() - 1 || k == basis.nk() - 1
        })
        .map(|m| c[m].norm())
        .fold(0.0, f64::max)
        / cmax;
    let functional_value = q * q / l4;
    let field = basis.to_band_field(&c, Arc::new(SigmaGrid::default_grid()))?;
    Ok(QBetaSolution {
        result: GroundStateResult {
            field,
            functional_value,
            quad_form: q,
            l4_fourth: l4,
            residual,
            iterations,
            beta: Some(beta),
        },
        normalized_value: functional_value / (1.0 - beta).powi(2),
        h1_sq,
        r_beta_h1: (h1_sq - v0).max(0.0).sqrt(),
        delta: (h1_sq - I_PLUS).abs() + (l4 - I_PLUS).abs(),
        tail,
        basis,
        coeffs: c,
    })
}

/// [`solve_qbeta_on`] on a fresh basis built from `config`, started from Q₊.
pub fn solve_qbeta(beta: f64, config: &QBetaConfig) -> Result<QBetaSolution> {
    let basis = Arc::new(LaguerreGalerkin::new(config.nj, config.nk, config.order)?);
    solve_qbeta_on(basis, beta, None, config)
}

/// Solves along a list of speeds, starting each solve from the previous solution.
pub fn solve_qbeta_path(betas: &[f64], config: &QBetaConfig) -> Result<Vec<QBetaSolution>> {
    let basis = Arc::new(LaguerreGalerkin::new(config.nj, config.nk, config.order)?);
    let mut out: Vec<QBetaSolution> = Vec::with_capacity(betas.len());
    for &b in betas {
        let start = out.last().map(|s| s.coeffs.clone());
        out.push(solve_qbeta_on(basis.clone(), b, start.as_deref(), config)?);
    }
    Ok(out)
}

/// J_β on Galerkin coefficients: ⟨−(Δ_ℍ + βD_s)u, u⟩² / ‖u‖⁴_{L⁴}.
pub fn j_beta_coeffs(basis: &LaguerreGalerkin, c: &[C64], beta: f64) -> Result<f64> {
    let q: f64 = basis
        .form_weights(beta)
        .iter()
        .zip(c)
        .map(|(a, v)| a * v.norm_sqr())
        .sum();
    if q == 0.0 {
        return Err(HwError::ZeroField);
    }
    Ok(q * q / basis.l4_fourth(&basis.synthesize(c)))
}

/// The β = 0 ground state, reached by continuation from Q₊ through β = 0.9, 0.8, …, 0.
///
/// Its `functional_value` is the truncated estimate of I₀, an upper bound for the
/// infimum up to cubature error.
pub fn estimate_i0(config: &QBetaConfig) -> Result<QBetaSolution> {
    let betas: Vec<f64> = (0..10).map(|i| f64::from(9 - i) / 10.0).collect();
    let mut path = solve_qbeta_path(&betas, config)?;
    path.pop()
        .ok_or(HwError::InvalidInput("empty continuation path".into()))
}

/// Re-expresses coefficients on a larger or smaller basis, padding with zeros.
pub fn transfer_coefficients(from: &LaguerreGalerkin, c: &[C64], to: &LaguerreGalerkin) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); to.dim()];
    for (m, v) in c.iter().enumerate() {
        let (sign, k, j) = from.label(m);
        if k < to.nk() && j < to.nj() {
            out[to.index(sign, k, j)] = *v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> QBetaConfig {
        QBetaConfig {
            nj: 12,
            nk: 4,
            order: 41,
            ..QBetaConfig::default()
        }
    }

    #[test]
    fn newton_converges_near_the_limit() {
        let s = solve_qbeta(0.99, &small()).unwrap();
        assert!(s.result.residual < 2e-4, "residual {}", s.result.residual);
        assert!(s.normalized_value <= I_PLUS && s.normalized_value > 0.95 * I_PLUS);
        assert!((s.result.l4_fourth - s.normalized_value).abs() < 1e-9 * s.normalized_value);
        assert!(s.r_beta_h1 > 0.0 && s.r_beta_h1 < 0.1);
        let a = s.coeffs[s.basis.index(Sign::Plus, 0, 0)];
        assert!(a.im.abs() < 1e-15 && a.re > 0.0);
    }

    #[test]
    fn i0_bounds_j0_from_below() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let s = estimate_i0(&small()).unwrap();
        let i0 = s.result.functional_value;
        assert!(i0 > 0.0 && i0 < I_PLUS, "I₀ = {i0}");
        assert!((j_beta_coeffs(&s.basis, &s.coeffs, 0.0).unwrap() - i0).abs() < 1e-12 * i0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 0..20 {
            let eps = if n < 10 { 0.05 } else { 1.0 };
            let c: Vec<C64> = s
                .coeffs
                .iter()
                .map(|v| {
                    let d = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    if n < 10 {
                        v + eps * v.norm().max(1e-2) * d
                    } else {
                        d
                    }
                })
                .collect();
            let j = j_beta_coeffs(&s.basis, &c, 0.0).unwrap();
            assert!(j >= i0 * (1.0 - 1e-9), "J₀(u) = {j} < I₀ = {i0}");
        }
    }

    #[test]
    fn path_and_single_solves_agree() {
        let path = solve_qbeta_path(&[0.95, 0.99], &small()).unwrap();
        let direct = solve_qbeta(0.99, &small()).unwrap();
        assert!((path[1].normalized_value - direct.normalized_value).abs() < 1e-10);
    }

    #[test]
    fn rejects_speed_outside_range() {
        assert!(solve_qbeta(1.0, &small()).is_err());
        assert!(solve_qbeta(-0.1, &small()).is_err());
    }
}
