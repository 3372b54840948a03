//! Paley–Wiener transforms, the Bergman projector P₀ on ℂ₊, and the closed-form catalog.

mod catalog;
mod holo;
mod projector;

pub use catalog::{catalog_eval, f1, f2, f3, CatalogEntry};
pub use holo::{holo_from_v0, product_profile, pw_forward, pw_norm_sq, CPlaneFn, HoloFn, RationalTerm};
pub use projector::{
    bergman_project_raw, inner_cubature, inner_uhp, p0_inner, pw_correction_inner, BergmanTable, DEFAULT_CUBATURE_ORDER,
};
