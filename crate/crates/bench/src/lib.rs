//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use hw_core::linearized::qplus_profile;
use hw_core::spectral::SigmaGrid;
use hw_core::C64;

/// Deterministic decaying coefficient vector of length `dim`.
pub fn coefficients(dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|m| {
            let t = m as f64;
            C64::from_polar((-t / 10.0).exp(), 0.7 * t)
        })
        .collect()
}

/// Samples of the Q₊ profile on the default σ-grid, with the grid.
pub fn qplus_samples() -> (Arc<SigmaGrid>, Vec<C64>) {
    let grid = Arc::new(SigmaGrid::default_grid());
    let values = qplus_profile(grid.clone())
        .expect("Q₊ on the default grid")
        .values()
        .to_vec();
    (grid, values)
}
