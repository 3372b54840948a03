//! Quadrature rules, adaptive integration and special functions.

mod gauss;
mod quadrature;
mod special;

pub use gauss::{gauss_legendre, gauss_legendre_on};
pub use quadrature::{
    integrate_halfline, integrate_interval, integrate_line, integrate_panels, integrate_uhp, integrate_uhp_centered,
    Integral, QuadratureSpec,
};
pub use special::{gamma, log0};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
