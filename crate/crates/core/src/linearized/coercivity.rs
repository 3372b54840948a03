//! The coercivity constant C of the rank-corrected quartic form, the gap δ, and seeded
//! Rayleigh-quotient sampling of (𝓛h, h)/‖h‖²_{Ḣ¹} on the quadruple orthogonal complement.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::limit::{h1_norm_sq, pairing_functionals, quadratic_form_l, LinearizedLimit, OrthoBasisV};
use crate::bergman::{BergmanTable, DEFAULT_CUBATURE_ORDER};
use crate::error::{HwError, Result};
use crate::numerics::{QuadratureSpec, C64};
use crate::spectral::{ClosedForm, ExpTerm, SigmaGrid, SigmaProfile, UhpCubature};

/// The nine inner products entering C: ‖F_j‖², ⟨F_j, F_{Q₊}′⟩ and ⟨F_j, F̃⟩ for j = 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableInners {
    pub norm_sq: [f64; 3],
    pub with_fq_prime: [f64; 3],
    pub with_f_tilde: [f64; 3],
}

impl TableInners {
    /// π/4, π/8, π/8; −2√2/3, −2√2/9, 2√2/15; −2√2/15, 14√2/45, 2√2/35.
    pub fn exact() -> Self {
        let r = 2f64.sqrt();
        Self {
            norm_sq: [PI / 4.0, PI / 8.0, PI / 8.0],
            with_fq_prime: [-2.0 * r / 3.0, -2.0 * r / 9.0, 2.0 * r / 15.0],
            with_f_tilde: [-2.0 * r / 15.0, 14.0 * r / 45.0, 2.0 * r / 35.0],
        }
    }

    /// Entries in the order norms, F_{Q₊}′ pairings, F̃ pairings.
    pub fn entries(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        out[..3].copy_from_slice(&self.norm_sq);
        out[3..6].copy_from_slice(&self.with_fq_prime);
        out[6..].copy_from_slice(&self.with_f_tilde);
        out
    }

    /// Largest absolute deviation from [`TableInners::exact`].
    pub fn max_error(&self) -> f64 {
        self.entries()
            .iter()
            .zip(Self::exact().entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// δ = 2(1 − 1/(1 + (1 − 2C)/4)).
pub fn delta_from_c(c: f64) -> Result<f64> {
    if !(c < 0.5) {
        return Err(HwError::CoercivityViolation(c));
    }
    Ok(2.0 * (1.0 - 1.0 / (1.0 + (1.0 - 2.0 * c) / 4.0)))
}

/// `x` rounded to `digits` significant digits.
pub fn round_significant(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

/// Everything that goes into the coercivity statement.
#[derive(Debug, Clone, Serialize)]
pub struct CoercivityReport {
    /// ⟨πP₀F_j, F_j⟩.
    pub p0_inners: [f64; 3],
    pub table_inners: TableInners,
    #[serde(rename = "C")]
    pub c: f64,
    /// δ to four significant digits.
    pub delta: f64,
    /// ‖𝓛h‖_{Ḣ⁻¹}/‖h‖_{Ḣ¹} for h = ∂ₛQ₊, iQ₊, Q₊ + 2i∂ₛQ₊.
    pub kernel_residuals: [f64; 3],
    pub rayleigh_min: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Assembles the report with the Bergman table on a cubature of the given odd order and
/// `samples` seeded Rayleigh quotients.
pub fn assemble_coercivity(order: usize, samples: usize, seed: u64) -> Result<CoercivityReport> {
    let table = BergmanTable::compute(order)?;
    let c = table.coercivity_constant()?;
    let delta = round_significant(delta_from_c(c)?, 4);
    let table_inners = TableInners {
        norm_sq: table.norm_sq,
        with_fq_prime: table.with_fq_prime.map(|v| v.re),
        with_f_tilde: table.with_f_tilde.map(|v| v.re),
    };
    let op = LinearizedLimit::default_grid()?;
    let v = OrthoBasisV::new(op.grid().clone())?;
    let kernel_residuals = [
        op.relative_residual(&v.basis[0])?,
        op.relative_residual(&v.directions[1])?,
        op.relative_residual(&v.basis[2])?,
    ];
    let sampler = RayleighSampler::new(op.grid().clone(), UhpCubature::new(order, order))?;
    let rayleigh = sampler.sample(samples, seed)?;
    Ok(CoercivityReport {
        p0_inners: table.p0_inner,
        table_inners,
        c,
        delta,
        kernel_residuals,
        rayleigh_min: rayleigh.min,
        samples,
        seed,
    })
}

/// [`assemble_coercivity`] on the default cubature.
pub fn assemble_coercivity_default(samples: usize, seed: u64) -> Result<CoercivityReport> {
    assemble_coercivity(DEFAULT_CUBATURE_ORDER, samples, seed)
}

/// Rates and powers of the bump dictionary σⁿe^{−aσ}.
const DICTIONARY_RATES: [f64; 4] = [0.75, 1.0, 1.5, 2.5];
const DICTIONARY_POWERS: u32 = 6;

/// Result of [`RayleighSampler::sample`].
#[derive(Debug, Clone, Serialize)]
pub struct RayleighSample {
    pub min: f64,
    /// Quotients of the accepted draws, in draw order.
    pub quotients: Vec<f64>,
    /// Draws removed because the projection annihilated them.
    pub excluded: usize,
}

/// Draws random constrained V₀⁺ profiles and evaluates their Rayleigh quotients.
#[derive(Debug, Clone)]
pub struct RayleighSampler {
    grid: Arc<SigmaGrid>,
    rule: UhpCubature,
    dictionary: Vec<ClosedForm>,
    constraints: [ClosedForm; 2],
    spec: QuadratureSpec,
}

fn term(coeff: C64, power: u32, rate: f64) -> ExpTerm {
    ExpTerm {
        coeff,
        power,
        rate: C64::new(rate, 0.0),
    }
}

/// Complex Ḣ¹ inner product ½∫f ḡ of closed forms by polarization of exact norms.
fn inner_closed(f: &ClosedForm, g: &ClosedForm) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..4 {
        let ik = C64::i().powu(k);
        let sum = f
            .add(&g.scale(ik))
            .ok_or_else(|| HwError::InvalidInput("closed forms cannot be combined".into()))?;
        acc += ik * sum.l2_sq();
    }
    Ok(acc * 0.125)
}

fn combine(f: &ClosedForm, c: C64, g: &ClosedForm) -> Result<ClosedForm> {
    f.add(&g.scale(c))
        .ok_or_else(|| HwError::InvalidInput("closed forms cannot be combined".into()))
}

impl RayleighSampler {
    /// Sampler whose profiles live on `grid` and whose ℂ₊ integrals use `rule`.
    pub fn new(grid: Arc<SigmaGrid>, rule: UhpCubature) -> Result<Self> {
        let mut dictionary = Vec::new();
        for &a in &DICTIONARY_RATES {
            for n in 0..DICTIONARY_POWERS {
                let form = ClosedForm::ExpPoly {
                    terms: vec![term(C64::new(1.0, 0.0), n, a)],
                };
                let norm = (0.5 * form.l2_sq()).sqrt();
                dictionary.push(form.scale(C64::new(1.0 / norm, 0.0)));
            }
        }
        // Ḣ¹-orthonormal basis of span(e^{−σ}, σe^{−σ}), the Riesz representatives of the
        // pairings with Q₊ and ∂ₛQ₊.
        let e0 = ClosedForm::ExpPoly {
            terms: vec![term(C64::new(1.0, 0.0), 0, 1.0)],
        };
        let e1 = ClosedForm::ExpPoly {
            terms: vec![term(C64::new(1.0, 0.0), 1, 1.0)],
        };
        let g0 = e0.scale(C64::new(1.0 / inner_closed(&e0, &e0)?.re.sqrt(), 0.0));
        let r = combine(&e1, -inner_closed(&e1, &g0)?, &g0)?;
        let g1 = r.scale(C64::new(1.0 / inner_closed(&r, &r)?.re.sqrt(), 0.0));
        Ok(Self {
            grid,
            rule,
            dictionary,
            constraints: [g0, g1],
            spec: QuadratureSpec::default(),
        })
    }

    /// Removes the components along Q₊, iQ₊, ∂ₛQ₊, i∂ₛQ₊; `draw` labels a
    /// [`HwError::DegenerateSample`].
    pub fn constrain(&self, f: &ClosedForm, draw: usize) -> Result<SigmaProfile> {
        let before = inner_closed(f, f)?.re;
        let mut g = f.clone();
        for c in &self.constraints {
            g = combine(&g, -inner_closed(&g, c)?, c)?;
        }
        let after = inner_closed(&g, &g)?.re;
        if !(after > 1e-20 * before) {
            return Err(HwError::DegenerateSample(draw));
        }
        SigmaProfile::from_closed(self.grid.clone(), g)
    }

    /// Random dictionary combination with complex Gaussian coefficients, from substream
    /// `draw` of `seed`.
    pub fn draw(&self, seed: u64, draw: usize) -> ClosedForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw as u64);
        let mut terms = Vec::new();
        for d in &self.dictionary {
            let c = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            if let ClosedForm::ExpPoly { terms: t } = d.scale(c) {
                terms.extend(t);
            }
        }
        ClosedForm::ExpPoly { terms }
    }

    /// (𝓛h, h)/‖h‖²_{Ḣ¹}.
    pub fn quotient(&self, h: &SigmaProfile) -> Result<f64> {
        Ok(quadratic_form_l(h, &self.rule, &self.spec)? / h1_norm_sq(h))
    }

    /// Minimum quotient over `n` draws; draws annihilated by the projection are excluded.
    pub fn sample(&self, n: usize, seed: u64) -> Result<RayleighSample> {
        if n == 0 {
            return Err(HwError::InvalidInput(
                "rayleigh sampling needs at least one draw".into(),
            ));
        }
        let mut quotients = Vec::with_capacity(n);
        let mut excluded = 0;
        for d in 0..n {
            match self.constrain(&self.draw(seed, d), d) {
                Ok(h) => quotients.push(self.quotient(&h)?),
                Err(HwError::DegenerateSample(_)) => excluded += 1,
                Err(e) => return Err(e),
            }
        }
        let min = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(RayleighSample {
            min,
            quotients,
            excluded,
        })
    }

    /// Pairings (c₀, c₁) of a profile, for checking the constraints.
    pub fn pairings(&self, h: &SigmaProfile) -> Result<(C64, C64)> {
        pairing_functionals(h, &self.spec)
    }
}

/// Minimum Rayleigh quotient of `n` seeded draws on the default grid and cubature.
pub fn rayleigh_sample(n: usize, seed: u64) -> Result<RayleighSample> {
    let sampler = RayleighSampler::new(
        Arc::new(SigmaGrid::default_grid()),
        UhpCubature::new(DEFAULT_CUBATURE_ORDER, DEFAULT_CUBATURE_ORDER),
    )?;
    sampler.sample(n, seed)
}
