//! Linearized operators around Q₊ and Q_β, the coercivity constant and the Q̇_β system.

mod coercivity;
mod limit;
mod traveling;

pub use coercivity::{
    assemble_coercivity, assemble_coercivity_default, delta_from_c, rayleigh_sample, round_significant,
    CoercivityReport, RayleighSample, RayleighSampler, TableInners,
};
pub use limit::{
    ds_qplus_profile, dual_pairing, h1_inner, h1_norm_sq, hm1_norm_sq, holo_on_rule, matrix_on_v, pairing_functionals,
    qplus_profile, quadratic_form_l, sphere_eigencheck, sphere_pullback, symmetry_gram, symmetry_jacobian,
    LinearizedLimit, OrthoBasisV, SphereMode, ORTHOGONALITY_TOLERANCE,
};
pub use traveling::{
    apply_lbeta, fd_compare, invertibility_margin, kernel_residuals, lbeta_matrix, lbeta_relative_residual,
    margin_parts, margin_report, orthonormal_coordinates, qdot_rhs, solve_qdot, symmetry_directions, KernelResiduals,
    MarginParts, MarginReport, QDotComparison, QDotSolution, MARGIN_STABILITY,
};
