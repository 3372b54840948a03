//! Band decomposition of radial fields: σ-profiles, Sobolev norms, the β-twisted quadratic form,
//! real-space synthesis and L⁴ norms.

mod band;
mod convolution;
mod cubature;
mod grid;
mod io;
mod profile;
mod synthesis;

pub use band::{
    basis_eval, hermite_function, hk_norm, project_v0plus, quad_form_beta, radial_band, Band, BandField, BasisKind,
    Sign,
};
pub use convolution::{l4_norm_v0, ConvolutionPlan};
pub use cubature::UhpCubature;
pub use grid::{SigmaGrid, Stencil, DEFAULT_NSIGMA, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN};
pub use io::{ProfileFile, ProfileMeta};
pub use profile::{laguerre_band_table, laguerre_values, ClosedForm, ExpTerm, SigmaProfile};
pub use synthesis::{analyze, l4_norm_grid, synthesize, GridField, DEFAULT_LS, DEFAULT_NR, DEFAULT_NS};
