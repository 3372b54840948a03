//! JSON exchange format for σ-profiles.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::SigmaGrid;
use super::profile::{ClosedForm, SigmaProfile};
use crate::error::{HwError, Result};
use crate::numerics::C64;

/// Optional closed-form metadata: f(σ) = K e^{−ασ}.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    /// Rate α.
    pub alpha: Option<f64>,
    /// Re K.
    #[serde(rename = "K_re")]
    pub k_re: Option<f64>,
    /// Im K.
    #[serde(rename = "K_im")]
    pub k_im: Option<f64>,
}

/// On-disk profile: nodes, real and imaginary parts, metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    /// Grid nodes.
    pub sigma: Vec<f64>,
    /// Real parts of the samples.
    pub re: Vec<f64>,
    /// Imaginary parts of the samples.
    pub im: Vec<f64>,
    /// Closed-form metadata.
    #[serde(default)]
    pub meta: ProfileMeta,
}

impl ProfileFile {
    /// Serializable view of a profile.
    pub fn from_profile(f: &SigmaProfile) -> Self {
        let meta = match f.closed_form() {
            Some(ClosedForm::Exponential { k, alpha }) => ProfileMeta {
                alpha: Some(*alpha),
                k_re: Some(k.re),
                k_im: Some(k.im),
            },
            _ => ProfileMeta::default(),
        };
        Self {
            sigma: f.grid().nodes().to_vec(),
            re: f.values().iter().map(|v| v.re).collect(),
            im: f.values().iter().map(|v| v.im).collect(),
            meta,
        }
    }

    /// Profile described by the file; exponential metadata must agree with the samples.
    pub fn to_profile(&self) -> Result<SigmaProfile> {
        if self.re.len() != self.sigma.len() || self.im.len() != self.sigma.len() {
            return Err(HwError::InvalidInput("profile arrays differ in length".into()));
        }
        let grid = Arc::new(SigmaGrid::from_nodes(self.sigma.clone())?);
        let values: Vec<C64> = self.re.iter().zip(&self.im).map(|(a, b)| C64::new(*a, *b)).collect();
        if let (Some(alpha), Some(k_re), Some(k_im)) = (self.meta.alpha, self.meta.k_re, self.meta.k_im) {
            let f = SigmaProfile::from_closed(
                grid,
                ClosedForm::Exponential {
                    k: C64::new(k_re, k_im),
                    alpha,
                },
            )?;
            let scale = f.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
            if f.values()
                .iter()
                .zip(&values)
                .any(|(a, b)| (a - b).norm() > 1e-12 * scale)
            {
                return Err(HwError::InvalidInput(
                    "samples disagree with the exponential metadata".into(),
                ));
            }
            return Ok(f);
        }
        SigmaProfile::sampled(grid, values)
    }

    /// JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Parses JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HwError::InvalidInput(format!("profile JSON: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let grid = Arc::new(SigmaGrid::log_spaced(1e-3, 20.0, 64).unwrap());
        let f = SigmaProfile::from_closed(
            grid.clone(),
            ClosedForm::Exponential {
                k: C64::new(1.0, -2.0),
                alpha: 0.5,
            },
        )
        .unwrap();
        let text = ProfileFile::from_profile(&f).to_json();
        let g = ProfileFile::from_json(&text).unwrap().to_profile().unwrap();
        assert_eq!(g.closed_form(), f.closed_form());
        assert_eq!(g.values(), f.values());
        let s = f.clone().into_sampled();
        let h = ProfileFile::from_json(&ProfileFile::from_profile(&s).to_json())
            .unwrap()
            .to_profile()
            .unwrap();
        assert!(h.closed_form().is_none());
        let mut bad = ProfileFile::from_profile(&f);
        bad.re[3] += 1.0;
        assert!(bad.to_profile().is_err());
    }
}
