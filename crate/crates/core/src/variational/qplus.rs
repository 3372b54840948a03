//! The limiting ground state Q₊ by normalized gradient descent on J₊ over V₀⁺ profiles.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::functionals::{apply_symmetry_profile, SymmetryParams};
use crate::error::{HwError, Result};
use crate::numerics::C64;
use crate::spectral::{
    BandField, ConvolutionPlan, SigmaGrid, SigmaProfile, Sign, DEFAULT_NSIGMA, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN,
};

/// A ground state with its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct GroundStateResult {
    /// The minimizer.
    #[serde(skip)]
    pub field: BandField,
    /// Value of the minimized functional.
    pub functional_value: f64,
    /// ‖Q‖²_{Ḣ¹} for Q₊, or ⟨−(Δ_ℍ + βD_s)Q, Q⟩ for Q_β.
    pub quad_form: f64,
    /// ‖Q‖⁴_{L⁴}.
    pub l4_fourth: f64,
    /// Ḣ⁻¹ norm of the residual of the stationary equation.
    pub residual: f64,
    /// Iterations used.
    pub iterations: usize,
    /// Traveling speed β, absent for Q₊.
    pub beta: Option<f64>,
}

/// Settings of the Q₊ solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPlusConfig {
    /// Smallest grid node.
    pub sigma_min: f64,
    /// Largest grid node.
    pub sigma_max: f64,
    /// Number of grid nodes.
    pub n_sigma: usize,
    /// Iteration budget.
    pub max_iterations: usize,
    /// Target Ḣ⁻¹ residual of D_sQ − Π₀⁺(|Q|²Q).
    pub tolerance: f64,
    /// Iterations over which a relative decrease below 1e−12 counts as a plateau.
    pub plateau_window: usize,
}

impl Default for QPlusConfig {
    fn default() -> Self {
        Self {
            sigma_min: DEFAULT_SIGMA_MIN,
            sigma_max: DEFAULT_SIGMA_MAX,
            n_sigma: DEFAULT_NSIGMA,
            max_iterations: 2000,
            tolerance: 1e-6,
            plateau_window: 50,
        }
    }
}

/// Least-squares fit f ≈ K e^{−ασ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    /// Amplitude K.
    pub k: C64,
    /// Rate α.
    pub alpha: f64,
    /// ‖f − Ke^{−ασ}‖_{L²} / ‖f‖_{L²}.
    pub relative_residual: f64,
}

/// Output of [`solve_qplus`].
#[derive(Debug, Clone)]
pub struct QPlusSolution {
    /// The canonicalized ground state.
    pub result: GroundStateResult,
    /// Its V₀⁺ profile.
    pub profile: SigmaProfile,
    /// Exponential fit of the profile.
    pub fit: ExpFit,
    /// Symmetry applied to reach the canonical representative.
    pub canonicalization: SymmetryParams,
    /// J₊ after every accepted step.
    pub history: Vec<f64>,
}

struct State {
    f: Vec<C64>,
    h: f64,
    l: f64,
}

fn weighted_sq(w: &[f64], f: &[C64]) -> f64 {
    w.iter().zip(f).map(|(w, v)| w * v.norm_sqr()).sum()
}

fn evaluate(plan: &ConvolutionPlan, f: Vec<C64>) -> Result<State> {
    let w = plan.grid().weights();
    let h = 0.5 * weighted_sq(w, &f);
    if h == 0.0 {
        return Err(HwError::ZeroField);
    }
    let l = plan.l4_fourth(&f);
    if !(l.is_finite() && h.is_finite()) {
        return Err(HwError::NonFinite { what: "J₊ iterate" });
    }
    Ok(State { f, h, l })
}

/// Π₀⁺(|u|²u)/σ at the nodes together with the Ḣ⁻¹ residual of σf = Π₀⁺(|u|²u), for a
/// profile in the normalization ‖u‖²_{Ḣ¹} = ‖u‖⁴_{L⁴}.
fn residual(plan: &ConvolutionPlan, f: &[C64]) -> (Vec<C64>, f64) {
    let nodes = plan.grid().nodes();
    let g = plan.convolve(f, f);
    let p = plan.project(&g, f);
    let r: Vec<C64> = f.iter().zip(&p).zip(nodes).map(|((f, p), s)| f - p / s).collect();
    let norm = (0.5 * weighted_sq(plan.grid().weights(), &r)).sqrt();
    (r, norm)
}

fn normalize(state: &mut State) {
    let c = (state.h / state.l).sqrt();
    for v in &mut state.f {
        *v *= c;
    }
    state.h *= c * c;
    state.l *= c.powi(4);
}

/// Fits K e^{−ασ} to a profile by golden-section search in α.
pub fn exp_fit(f: &SigmaProfile) -> Result<ExpFit> {
    let grid = f.grid();
    let (nodes, w) = (grid.nodes(), grid.weights());
    let norm = weighted_sq(w, f.values());
    if norm == 0.0 {
        return Err(HwError::ZeroField);
    }
    let fit_at = |alpha: f64| {
        let e: Vec<f64> = nodes.iter().map(|s| (-alpha * s).exp()).collect();
        let num: C64 = w.iter().zip(f.values()).zip(&e).map(|((w, v), e)| w * e * v).sum();
        let den: f64 = w.iter().zip(&e).map(|(w, e)| w * e * e).sum();
        let k = num / den;
        let res: f64 = w
            .iter()
            .zip(f.values())
            .zip(&e)
            .map(|((w, v), e)| w * (v - k * e).norm_sqr())
            .sum();
        (k, res)
    };
    let (mut a, mut b) = (1e-2, 1e2f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut r1, mut r2) = (fit_at(x1).1, fit_at(x2).1);
    for _ in 0..200 {
        if r1 < r2 {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - g * (b - a);
            r1 = fit_at(x1).1;
        } else {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + g * (b - a);
            r2 = fit_at(x2).1;
        }
        if b - a < 1e-13 * b {
            break;
        }
    }
    let alpha = 0.5 * (a + b);
    let (k, res) = fit_at(alpha);
    Ok(ExpFit {
        k,
        alpha,
        relative_residual: (res / norm).sqrt(),
    })
}

/// Symmetry bringing a V₀⁺ profile to the canonical representative: ∫e^{−σ}f dσ > 0 and
/// ∫σ|f|² / ∫|f|² = 1/2.
pub fn canonical_params(f: &SigmaProfile) -> Result<SymmetryParams> {
    let grid = f.grid();
    let (nodes, w) = (grid.nodes(), grid.weights());
    let m0 = weighted_sq(w, f.values());
    if m0 == 0.0 {
        return Err(HwError::ZeroField);
    }
    let m1: f64 = nodes
        .iter()
        .zip(w)
        .zip(f.values())
        .map(|((s, w), v)| s * w * v.norm_sqr())
        .sum();
    let alpha = (0.5 * m0 / m1).sqrt();
    let pairing: C64 = nodes
        .iter()
        .zip(w)
        .zip(f.values())
        .map(|((s, w), v)| w * (-s * alpha * alpha).exp() * v)
        .sum();
    SymmetryParams::new(0.0, -pairing.arg(), alpha)
}

/// Minimizes J₊ over V₀⁺ profiles on a logarithmic σ-grid.
///
/// The iteration starts from σe^{−σ}, moves along the negative Ḣ¹ gradient direction
/// f − Π₀⁺(|u|²u)/σ with a backtracking step, and renormalizes to ‖u‖²_{Ḣ¹} = ‖u‖⁴_{L⁴}
/// after every step. The result is canonicalized by [`canonical_params`].
pub fn solve_qplus(config: &QPlusConfig) -> Result<QPlusSolution> {
    if config.n_sigma < 8 || !(config.tolerance > 0.0) || config.plateau_window == 0 {
        return Err(HwError::InvalidInput(format!("unusable Q₊ solver settings {config:?}")));
    }
    let grid = Arc::new(SigmaGrid::log_spaced(
        config.sigma_min,
        config.sigma_max,
        config.n_sigma,
    )?);
    let plan = ConvolutionPlan::new(grid.clone());
    let nodes = grid.nodes();
    let mut state = evaluate(&plan, nodes.iter().map(|s| C64::new(s * (-s).exp(), 0.0)).collect())?;
    normalize(&mut state);
    let mut history = vec![state.h * state.h / state.l];
    let mut tau = 1.0;
    let mut iterations = 0;
    let (mut dir, mut res) = residual(&plan, &state.f);
    while res > config.tolerance {
        if iterations >= config.max_iterations {
            return Err(HwError::NoConvergence {
                what: "solve_qplus",
                iterations,
                residual: res,
            });
        }
        iterations += 1;
        let j = history[history.len() - 1];
        let mut accepted = None;
        while tau > 1e-8 {
            let trial: Vec<C64> = state.f.iter().zip(&dir).map(|(f, d)| f - tau * d).collect();
            let mut cand = evaluate(&plan, trial)?;
            normalize(&mut cand);
            let jc = cand.h * cand.h / cand.l;
            if jc <= j {
                accepted = Some((cand, jc));
                break;
            }
            tau *= 0.5;
        }
        let Some((cand, jc)) = accepted else {
            return Err(HwError::NoConvergence {
                what: "solve_qplus line search",
                iterations,
                residual: res,
            });
        };
        state = cand;
        history.push(jc);
        tau = (tau * 1.5).min(1.5);
        (dir, res) = residual(&plan, &state.f);
        let n = history.len();
        if n > config.plateau_window {
            let old = history[n - 1 - config.plateau_window];
            if (old - jc) < 1e-12 * old && res > config.tolerance {
                return Err(HwError::NoConvergence {
                    what: "solve_qplus plateau",
                    iterations,
                    residual: res,
                });
            }
        }
    }
    let raw = SigmaProfile::sampled(grid.clone(), state.f)?;
    let canon = canonical_params(&raw)?;
    let profile = apply_symmetry_profile(&canon, &raw, Sign::Plus)?;
    let fit = exp_fit(&profile)?;
    let w = grid.weights();
    let quad_form = 0.5 * weighted_sq(w, profile.values());
    let l4_fourth = plan.l4_fourth(profile.values());
    let (_, final_res) = residual(&plan, profile.values());
    let result = GroundStateResult {
        field: BandField::single(0, Sign::Plus, profile.clone()),
        functional_value: quad_form * quad_form / l4_fourth,
        quad_form,
        l4_fourth,
        residual: final_res,
        iterations,
        beta: None,
    };
    Ok(QPlusSolution {
        result,
        profile,
        fit,
        canonicalization: canon,
        history,
    })
}

/// The exact ground state 2πe^{−σ} on the default grid.
pub fn qplus_exact(grid: Arc<SigmaGrid>) -> Result<SigmaProfile> {
    SigmaProfile::from_closed(
        grid,
        crate::spectral::ClosedForm::Exponential {
            k: C64::new(2.0 * PI, 0.0),
            alpha: 1.0,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variational::I_PLUS;

    #[test]
    fn ground_state_from_default_start() {
        let sol = solve_qplus(&QPlusConfig::default()).unwrap();
        let r = &sol.result;
        assert!(
            (r.functional_value - I_PLUS).abs() < 1e-4 * I_PLUS,
            "J = {}",
            r.functional_value
        );
        assert!(r.residual < 1e-5, "residual {}", r.residual);
        assert!(sol.fit.relative_residual < 1e-3, "fit {:?}", sol.fit);
        let worst = sol
            .profile
            .grid()
            .nodes()
            .iter()
            .zip(sol.profile.values())
            .map(|(s, v)| (v - 2.0 * PI * (-s).exp()).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "pointwise deviation {worst}");
        assert!(sol.history.windows(2).all(|w| w[1] <= w[0]));
        assert!((r.quad_form - I_PLUS).abs() < 1e-4 * I_PLUS);
    }

    #[test]
    fn fit_recovers_exponentials() {
        let grid = Arc::new(SigmaGrid::default_grid());
        let f = SigmaProfile::from_closed(
            grid,
            crate::spectral::ClosedForm::Exponential {
                k: C64::new(1.5, -0.5),
                alpha: 1.7,
            },
        )
        .unwrap();
        let fit = exp_fit(&f).unwrap();
        assert!((fit.alpha - 1.7).abs() < 1e-8 && (fit.k - C64::new(1.5, -0.5)).norm() < 1e-8);
        assert!(fit.relative_residual < 1e-6);
        let p = canonical_params(&f).unwrap();
        assert!((p.alpha - 1.7f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_config() {
        let c = QPlusConfig {
            n_sigma: 3,
            ..QPlusConfig::default()
        };
        assert!(solve_qplus(&c).is_err());
        let c = QPlusConfig {
            max_iterations: 1,
            ..QPlusConfig::default()
        };
        assert!(matches!(solve_qplus(&c), Err(HwError::NoConvergence { .. })));
    }
}
