//! Ground states of the limiting and traveling-wave problems and the functionals they minimize.

mod checks;
mod functionals;
mod galerkin;
mod qbeta;
mod qplus;

pub use checks::{
    convolution_check, convolution_check_qbeta, convolve_fundamental, convolve_kernel, decay_check, decay_check_qbeta,
    interior_points, ConvolutionGrid, ConvolutionLevel, ConvolutionReport, DecayReport,
};
pub use functionals::{
    apply_symmetry, apply_symmetry_profile, delta_gap, delta_gap_bands, j_beta, j_plus, j_plus_with, l4_fourth_v0,
    SymmetryParams, I_PLUS,
};
pub use galerkin::{from_real, to_real, LaguerreGalerkin};
pub use qbeta::{
    dual_norm, equation_residual, estimate_i0, free_coordinates, gauge_coordinates, h1_norm, j_beta_coeffs,
    operator_diagonal, solve_qbeta, solve_qbeta_on, solve_qbeta_path, transfer_coefficients, QBetaConfig,
    QBetaSolution,
};
pub use qplus::{
    canonical_params, exp_fit, qplus_exact, solve_qplus, ExpFit, GroundStateResult, QPlusConfig, QPlusSolution,
};
