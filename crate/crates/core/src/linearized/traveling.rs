//! The linearized operator 𝓛_{Q_β} on the Galerkin basis, its invertibility margin modulo the
//! symmetry directions, and the derivative Q̇_β of the traveling-wave family.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{HwError, Result};
use crate::numerics::C64;
use crate::spectral::{BandField, SigmaGrid, Sign};
use crate::variational::{
    dual_norm, from_real, gauge_coordinates, h1_norm, operator_diagonal, solve_qbeta_on, to_real,
    transfer_coefficients, LaguerreGalerkin, QBetaConfig, QBetaSolution,
};

/// Real matrix of 𝓛_{Q_β}h = −(Δ_ℍ + βD_s)h/(1−β) − 2|Q_β|²h − Q_β²h̄ on (Re c, Im c),
/// mapping coefficients to dual coefficients.
pub fn lbeta_matrix(sol: &QBetaSolution) -> DMatrix<f64> {
    let beta = sol.result.beta.unwrap_or(0.0);
    let basis = &sol.basis;
    basis.linearized_real(&basis.synthesize(&sol.coeffs), &operator_diagonal(basis, beta))
}

/// Coefficients of 𝓛_{Q_β}h, as a dual vector on the same basis.
pub fn apply_lbeta(sol: &QBetaSolution, h: &[C64]) -> Result<Vec<C64>> {
    if h.len() != sol.basis.dim() {
        return Err(HwError::InvalidInput(format!(
            "h has {} coefficients, basis has {}",
            h.len(),
            sol.basis.dim()
        )));
    }
    Ok(from_real(&(lbeta_matrix(sol) * to_real(h))))
}

/// ‖𝓛_{Q_β}h‖_{Ḣ⁻¹}/‖h‖_{Ḣ¹}.
pub fn lbeta_relative_residual(sol: &QBetaSolution, h: &[C64]) -> Result<f64> {
    let lh = apply_lbeta(sol, h)?;
    Ok(dual_norm(&sol.basis, &lh) / h1_norm(&sol.basis, h))
}

/// ‖𝓛_{Q_β}h‖_{Ḣ⁻¹}/‖h‖_{Ḣ¹} for the symmetry directions of Q_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelResiduals {
    /// h = ∂ₛQ_β.
    pub translation: f64,
    /// h = ∂ₛQ_β with the rows of the last Laguerre index left out, where multiplication by σ
    /// leaves the basis.
    pub translation_interior: f64,
    /// h = iQ_β.
    pub phase: f64,
}

/// Residuals of the translation and phase directions.
pub fn kernel_residuals(sol: &QBetaSolution) -> Result<KernelResiduals> {
    let basis = &sol.basis;
    let ds = basis.d_s(&sol.coeffs);
    let iq: Vec<C64> = sol.coeffs.iter().map(|v| v * C64::i()).collect();
    let mut l = apply_lbeta(sol, &ds)?;
    let norm = h1_norm(basis, &ds);
    let translation = dual_norm(basis, &l) / norm;
    for (m, v) in l.iter_mut().enumerate() {
        if basis.label(m).2 + 1 == basis.nj() {
            *v = C64::new(0.0, 0.0);
        }
    }
    Ok(KernelResiduals {
        translation,
        translation_interior: dual_norm(basis, &l) / norm,
        phase: lbeta_relative_residual(sol, &iq)?,
    })
}

/// Coefficients of Q₊ = 2πe^{−σ} on the (0, +) band.
fn qplus_coefficients(basis: &LaguerreGalerkin) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); basis.dim()];
    c[basis.index(Sign::Plus, 0, 0)] = C64::new(2f64.sqrt() * PI, 0.0);
    c
}

/// The directions ∂ₛQ₊, iQ₊ and Q₊ + 2i∂ₛQ₊ as coefficient vectors.
pub fn symmetry_directions(basis: &LaguerreGalerkin) -> [Vec<C64>; 3] {
    let q = qplus_coefficients(basis);
    let ds = basis.d_s(&q);
    let iq: Vec<C64> = q.iter().map(|v| v * C64::i()).collect();
    let dil: Vec<C64> = q.iter().zip(&ds).map(|(a, b)| a + 2.0 * C64::i() * b).collect();
    [ds, iq, dil]
}

/// Rows of h ↦ (h, v)_{Ḣ¹}/‖v‖_{Ḣ¹} for the symmetry directions, in the coordinates
/// y = W^{1/2}(Re c, Im c) in which the Ḣ¹ norm is Euclidean.
fn pairing_rows(basis: &LaguerreGalerkin) -> DMatrix<f64> {
    let w = basis.h1_weights();
    let m = basis.dim();
    let dirs = symmetry_directions(basis);
    DMatrix::from_fn(3, 2 * m, |r, i| {
        let v = to_real(&dirs[r]);
        w[i % m].sqrt() * v[i] / h1_norm(basis, &dirs[r])
    })
}

/// W^{−1/2} A W^{−1/2}: the operator between Ḣ¹ and Ḣ⁻¹ in orthonormal coordinates.
fn scaled(basis: &LaguerreGalerkin, a: &DMatrix<f64>) -> DMatrix<f64> {
    let w = basis.h1_weights();
    let m = basis.dim();
    DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] / (w[r % m] * w[c % m]).sqrt())
}

fn smallest_singular(a: DMatrix<f64>) -> f64 {
    a.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Smallest singular values of the operator matrix on an Ḣ¹-orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginParts {
    /// With the three pairing rows appended.
    pub augmented: f64,
    /// The operator alone.
    pub bare: f64,
}

/// Smallest singular values of 𝓛_{Q_β} with and without the pairing rows, the whole system
/// multiplied by `scale`.
pub fn margin_parts(sol: &QBetaSolution, scale: f64) -> MarginParts {
    let a = scaled(&sol.basis, &lbeta_matrix(sol)) * scale;
    let p = pairing_rows(&sol.basis) * scale;
    let n = a.ncols();
    let mut aug = DMatrix::zeros(a.nrows() + 3, n);
    aug.view_mut((0, 0), (a.nrows(), n)).copy_from(&a);
    aug.view_mut((a.nrows(), 0), (3, n)).copy_from(&p);
    MarginParts {
        augmented: smallest_singular(aug),
        bare: smallest_singular(a),
    }
}

/// Margin at two truncations.
#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub beta: f64,
    /// Laguerre functions per band of the coarse and refined truncations.
    pub basis_sizes: [usize; 2],
    pub margin: f64,
    pub refined_margin: f64,
    pub bare_margin: f64,
    /// |refined − margin|/margin.
    pub relative_change: f64,
}

/// Relative change above which a margin is declared unresolved.
pub const MARGIN_STABILITY: f64 = 0.1;

/// Invertibility margin of 𝓛_{Q_β} modulo the symmetry directions.
///
/// The solution is re-solved with `basis_size` and with `basis_size + 8` Laguerre functions per
/// band, starting from `sol`; `TruncationWarning` is returned when the two margins differ by
/// more than [`MARGIN_STABILITY`].
pub fn invertibility_margin(sol: &QBetaSolution, basis_size: usize, config: &QBetaConfig) -> Result<MarginReport> {
    let report = margin_report(sol, basis_size, config)?;
    if !(report.relative_change <= MARGIN_STABILITY) {
        return Err(HwError::TruncationWarning(format!(
            "margin {} changes to {} under refinement",
            report.margin, report.refined_margin
        )));
    }
    Ok(report)
}

/// The data of [`invertibility_margin`] without the stability verdict.
pub fn margin_report(sol: &QBetaSolution, basis_size: usize, config: &QBetaConfig) -> Result<MarginReport> {
    let beta = sol.result.beta.unwrap_or(0.0);
    let on = |nj: usize| -> Result<QBetaSolution> {
        if nj == sol.basis.nj() {
            return Ok(sol.clone());
        }
        let basis = Arc::new(LaguerreGalerkin::new(nj, sol.basis.nk(), sol.basis.order())?);
        let start = transfer_coefficients(&sol.basis, &sol.coeffs, &basis);
        solve_qbeta_on(basis, beta, Some(&start), config)
    };
    let coarse = on(basis_size)?;
    let fine = on(basis_size + 8)?;
    let a = margin_parts(&coarse, 1.0);
    let b = margin_parts(&fine, 1.0);
    Ok(MarginReport {
        beta,
        basis_sizes: [basis_size, basis_size + 8],
        margin: a.augmented,
        refined_margin: b.augmented,
        bare_margin: a.bare,
        relative_change: (b.augmented - a.augmented).abs() / a.augmented,
    })
}

/// Dual coefficients of −∂_β[−(Δ_ℍ + βD_s)/(1−β)]Q_β = −((2k+1) − ε)/(2(1−β)²) c.
pub fn qdot_rhs(basis: &LaguerreGalerkin, c: &[C64], beta: f64) -> Vec<C64> {
    let w = basis.h1_weights();
    c.iter()
        .enumerate()
        .map(|(m, v)| {
            let (sign, _, _) = basis.label(m);
            -v * (2.0 * w[m] - sign.as_f64()) / (2.0 * (1.0 - beta).powi(2))
        })
        .collect()
}

/// Solution of the Q̇_β system.
#[derive(Debug, Clone)]
pub struct QDotSolution {
    pub beta: f64,
    pub coeffs: Vec<C64>,
    pub field: BandField,
    /// ‖A x − b‖/‖b‖ of the augmented system.
    pub residual: f64,
}

/// Solves 𝓛_{Q_β}Q̇ = −∂_β[−(Δ_ℍ + βD_s)/(1−β)]Q_β with Q̇ Ḣ¹-orthogonal to ∂ₛQ₊, iQ₊ and
/// Q₊ + 2i∂ₛQ₊.
///
/// The equations along the gauge coordinates of the solver are replaced by the three
/// orthogonality conditions, matching the gauge slice on which Q_β is computed.
pub fn solve_qdot(sol: &QBetaSolution) -> Result<QDotSolution> {
    let beta = sol.result.beta.unwrap_or(0.0);
    let basis = &sol.basis;
    let n = 2 * basis.dim();
    let mut a = lbeta_matrix(sol);
    let mut b = to_real(&qdot_rhs(basis, &sol.coeffs, beta));
    let w = basis.h1_weights();
    let dirs = symmetry_directions(basis);
    for (row, dir) in gauge_coordinates(basis).iter().zip(&dirs) {
        let v = to_real(dir);
        for c in 0..n {
            a[(*row, c)] = w[c % basis.dim()] * v[c];
        }
        b[*row] = 0.0;
    }
    let x = match a.clone().lu().solve(&b) {
        Some(x) => x,
        None => {
            let s = smallest_singular(a.clone());
            return Err(HwError::SingularSystem(s));
        }
    };
    let residual = (&a * &x - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
    if !residual.is_finite() {
        return Err(HwError::SingularSystem(0.0));
    }
    let coeffs = from_real(&x);
    let field = basis.to_band_field(&coeffs, Arc::new(SigmaGrid::default_grid()))?;
    Ok(QDotSolution {
        beta,
        coeffs,
        field,
        residual,
    })
}

/// Comparison of [`solve_qdot`] with a central difference of gauge-fixed solves.
#[derive(Debug, Clone, Serialize)]
pub struct QDotComparison {
    pub beta: f64,
    pub dbeta: f64,
    pub residual: f64,
    /// ‖Q̇ − (Q_{β+dβ} − Q_{β−dβ})/(2dβ)‖_{Ḣ¹}/‖Q̇‖_{Ḣ¹}.
    pub relative_error: f64,
    pub qdot_h1: f64,
}

/// Solves at β ± dβ from `sol` and compares the central difference with Q̇_β.
pub fn fd_compare(sol: &QBetaSolution, dbeta: f64, config: &QBetaConfig) -> Result<QDotComparison> {
    let beta = sol.result.beta.unwrap_or(0.0);
    if !(dbeta > 0.0) || beta - dbeta < 0.0 || beta + dbeta >= 1.0 {
        return Err(HwError::DomainError(format!("dβ = {dbeta} at β = {beta}")));
    }
    let qdot = solve_qdot(sol)?;
    let plus = solve_qbeta_on(sol.basis.clone(), beta + dbeta, Some(&sol.coeffs), config)?;
    let minus = solve_qbeta_on(sol.basis.clone(), beta - dbeta, Some(&sol.coeffs), config)?;
    let diff: Vec<C64> = qdot
        .coeffs
        .iter()
        .zip(plus.coeffs.iter().zip(&minus.coeffs))
        .map(|(q, (p, m))| q - (p - m) / (2.0 * dbeta))
        .collect();
    let qdot_h1 = h1_norm(&sol.basis, &qdot.coeffs);
    Ok(QDotComparison {
        beta,
        dbeta,
        residual: qdot.residual,
        relative_error: h1_norm(&sol.basis, &diff) / qdot_h1,
        qdot_h1,
    })
}

/// Ḣ¹-orthonormal real coordinates of a coefficient vector.
pub fn orthonormal_coordinates(basis: &LaguerreGalerkin, c: &[C64]) -> DVector<f64> {
    let w = basis.h1_weights();
    let m = basis.dim();
    let x = to_real(c);
    DVector::from_fn(2 * m, |i, _| x[i] * w[i % m].sqrt())
}
