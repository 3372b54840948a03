//! Numerics for radial waves on the Heisenberg group ℍ¹.
//!
//! The crate covers the band decomposition of radial fields, Paley–Wiener and
//! Bergman-space transforms on the upper half-plane, variational ground states
//! Q₊ and Q_β, and the spectral analysis of the operator linearized around Q₊.

pub mod bergman;
pub mod error;
pub mod heisenberg;
pub mod linearized;
pub mod numerics;
pub mod spectral;
pub mod variational;

pub use error::{HwError, Result};
pub use heisenberg::{HPoint, SpherePoint};
pub use numerics::{QuadratureSpec, C64};
