//! Strictly increasing σ-grids with local cubic interpolation and matching nodal weights.

use serde::{Deserialize, Serialize};

use crate::error::{HwError, Result};
use crate::numerics::C64;

/// Nodes σ₀ < σ₁ < … of a sampled profile, with quadrature weights for ∫₀^∞ g(σ) dσ.
///
/// Interpolation and weights both use the four-node Lagrange stencil in the variable
/// x = ln σ, so that log-spaced grids are treated uniformly. Below σ₀ a profile is
/// continued linearly through the first two nodes, above the last node by zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaGrid {
    nodes: Vec<f64>,
    logs: Vec<f64>,
    weights: Vec<f64>,
}

/// Default smallest node of a log-spaced grid.
pub const DEFAULT_SIGMA_MIN: f64 = 1e-4;
/// Default largest node of a log-spaced grid.
pub const DEFAULT_SIGMA_MAX: f64 = 40.0;
/// Default number of nodes of a log-spaced grid.
pub const DEFAULT_NSIGMA: usize = 512;

/// Lagrange weights on up to four consecutive nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    /// First node index.
    pub start: usize,
    /// Number of nodes used.
    pub len: usize,
    /// Weights per node.
    pub weights: [f64; 4],
}

impl Stencil {
    /// Σ_a w_a v_{start+a}.
    #[inline]
    pub fn apply(&self, values: &[C64]) -> C64 {
        let v = &values[self.start..self.start + self.len];
        v.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    /// Adds c·w_a to out_{start+a}.
    #[inline]
    pub fn scatter(&self, c: C64, out: &mut [C64]) {
        for a in 0..self.len {
            out[self.start + a] += c * self.weights[a];
        }
    }
}

impl SigmaGrid {
    /// Log-spaced grid with `n` nodes on [min, max].
    pub fn log_spaced(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min > 0.0 && max > min && n >= 2) {
            return Err(HwError::InvalidInput(format!(
                "bad log grid [{min}, {max}] with {n} nodes"
            )));
        }
        let (a, b) = (min.ln(), max.ln());
        let nodes = (0..n)
            .map(|i| {
                if i == n - 1 {
                    max
                } else {
                    (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect();
        Self::from_nodes(nodes)
    }

    /// The default grid (1e−4, 40, 512 nodes).
    pub fn default_grid() -> Self {
        Self::log_spaced(DEFAULT_SIGMA_MIN, DEFAULT_SIGMA_MAX, DEFAULT_NSIGMA).expect("default grid is valid")
    }

    /// Grid on arbitrary strictly increasing positive nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(HwError::InvalidInput("a σ-grid needs at least two nodes".into()));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|v| !v.is_finite()) {
            return Err(HwError::InvalidInput(
                "σ-grid nodes must be finite, positive and strictly increasing".into(),
            ));
        }
        let logs: Vec<f64> = nodes.iter().map(|v| v.ln()).collect();
        let mut grid = Self {
            nodes,
            logs,
            weights: Vec::new(),
        };
        grid.weights = grid.build_weights();
        Ok(grid)
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false: grids have at least two nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node positions.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights W with ∫₀^∞ g dσ ≈ Σ W_a g(σ_a).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest node.
    pub fn min(&self) -> f64 {
        self.nodes[0]
    }

    /// Largest node.
    pub fn max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    fn stencil_start(&self, interval: usize) -> usize {
        let n = self.nodes.len();
        let width = n.min(4);
        interval.saturating_sub(1).min(n - width)
    }

    /// Index i with σ_i ≤ σ < σ_{i+1}, clamped to valid intervals.
    fn interval(&self, sigma: f64) -> usize {
        let n = self.nodes.len();
        match self
            .nodes
            .binary_search_by(|v| v.partial_cmp(&sigma).expect("finite nodes"))
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    fn lagrange(&self, start: usize, width: usize, x: f64, out: &mut [f64; 4]) {
        for a in 0..width {
            let xa = self.logs[start + a];
            let mut l = 1.0;
            for b in 0..width {
                if b != a {
                    let xb = self.logs[start + b];
                    l *= (x - xb) / (xa - xb);
                }
            }
            out[a] = l;
        }
    }

    /// Interpolation stencil at σ; `None` above the last node, where profiles vanish.
    pub fn stencil(&self, sigma: f64) -> Option<Stencil> {
        if sigma > self.max() {
            return None;
        }
        let mut w = [0.0; 4];
        if sigma <= self.nodes[0] {
            let (a, b) = (self.nodes[0], self.nodes[1]);
            let t = (sigma - a) / (b - a);
            w[0] = 1.0 - t;
            w[1] = t;
            return Some(Stencil {
                start: 0,
                len: 2,
                weights: w,
            });
        }
        let i = self.interval(sigma);
        let len = self.nodes.len().min(4);
        let start = self.stencil_start(i);
        self.lagrange(start, len, sigma.ln(), &mut w);
        Some(Stencil { start, len, weights: w })
    }

    /// Interpolated value of sampled data at σ.
    pub fn interpolate(&self, values: &[C64], sigma: f64) -> C64 {
        self.stencil(sigma).map_or(C64::new(0.0, 0.0), |st| st.apply(values))
    }

    fn build_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut weights = vec![0.0; n];
        let width = n.min(4);
        let g = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
        let gw = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let mut l = [0.0; 4];
        for i in 0..n - 1 {
            let start = self.stencil_start(i);
            let (x0, x1) = (self.logs[i], self.logs[i + 1]);
            let (c, h) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
            for q in 0..3 {
                self.lagrange(start, width, c + h * g[q], &mut l);
                for a in 0..width {
                    weights[start + a] += h * gw[q] * l[a];
                }
            }
        }
        // The x-integrand is g(σ)σ; the segment [0, σ₀] uses the linear continuation.
        for (w, s) in weights.iter_mut().zip(&self.nodes) {
            *w *= s;
        }
        let (a, b) = (self.nodes[0], self.nodes[1]);
        let t = -0.5 * a / (b - a);
        weights[0] += a * (1.0 - t);
        weights[1] += a * t;
        weights
    }
}
