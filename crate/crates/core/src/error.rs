//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HwError {
    /// An adaptive scheme exhausted its budget before meeting the tolerance.
    #[error("{what}: no convergence (error estimate {estimate:.3e}, requested {requested:.3e})")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        requested: f64,
    },
    /// An iterative solver stopped without satisfying its stopping rule.
    #[error("{what}: solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// An integrand or intermediate value was NaN or infinite.
    #[error("{what}: non-finite value encountered")]
    NonFinite { what: &'static str },
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    DomainError(String),
    /// Evaluation at the excluded pole of a map.
    #[error("pole error: {0}")]
    PoleError(String),
    /// Evaluation at the singular point of a kernel.
    #[error("singularity error: {0}")]
    SingularityError(String),
    /// A closed form was requested on its degenerate locus.
    #[error("branch error: {0}")]
    BranchError(String),
    /// The frequency support exceeds the Nyquist limit of a sampling grid.
    #[error("alias error: frequency {sigma_max} exceeds grid Nyquist limit {nyquist}")]
    AliasError { sigma_max: f64, nyquist: f64 },
    /// A field decays too slowly for the truncated box it is sampled on.
    #[error("truncation warning: {0}")]
    TruncationWarning(String),
    /// A functional was evaluated on the zero field.
    #[error("zero field")]
    ZeroField,
    /// A constrained routine received an input violating its constraint.
    #[error("orthogonality violation: pairing {pairing:.3e} exceeds {tolerance:.3e}")]
    OrthogonalityViolation { pairing: f64, tolerance: f64 },
    /// A random draw was annihilated by a projection.
    #[error("degenerate sample {0}")]
    DegenerateSample(usize),
    /// A linear system is numerically singular.
    #[error("singular system: smallest singular value {0:.3e}")]
    SingularSystem(f64),
    /// The assembled coercivity constant violates C < 1/2.
    #[error("coercivity violation: C = {0}")]
    CoercivityViolation(f64),
    /// Malformed input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, HwError>;
