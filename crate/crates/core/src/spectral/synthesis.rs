//! Real-space samples of radial fields on an (r², s) box, their L⁴ norm, and band analysis.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::band::{radial_band, Band, BandField, Sign};
use super::grid::SigmaGrid;
use super::profile::{laguerre_band_table, ClosedForm, SigmaProfile};
use crate::error::{HwError, Result};
use crate::numerics::{gauss_legendre, C64};

/// Default number of s-nodes.
pub const DEFAULT_NS: usize = 4096;
/// Default length of the s-box.
pub const DEFAULT_LS: f64 = 200.0;
/// Default number of r²-nodes.
pub const DEFAULT_NR: usize = 48;

const OVERSAMPLING: usize = 8;
const DECAY_RATIO: f64 = 1e-6;

/// Samples u(r²_a, s_b) on Gauss nodes in r² and a uniform periodic grid in s.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    r2_nodes: Vec<f64>,
    r2_weights: Vec<f64>,
    s_nodes: Vec<f64>,
    length_s: f64,
    samples: Vec<C64>,
}

impl GridField {
    /// Zero field on n_r Gauss nodes r² = c·t/(1−t) and N_s uniform s-nodes on [−L_s/2, L_s/2).
    pub fn template(n_r: usize, r2_scale: f64, n_s: usize, length_s: f64) -> Result<Self> {
        if n_r == 0 || n_s < 2 || !n_s.is_multiple_of(2) || !(length_s > 0.0) || !(r2_scale > 0.0) {
            return Err(HwError::InvalidInput(format!(
                "bad grid template n_r={n_r}, n_s={n_s}, L_s={length_s}, scale={r2_scale}"
            )));
        }
        let (x, w) = gauss_legendre(n_r);
        let mut r2_nodes = Vec::with_capacity(n_r);
        let mut r2_weights = Vec::with_capacity(n_r);
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (xi + 1.0);
            r2_nodes.push(r2_scale * t / (1.0 - t));
            r2_weights.push(0.5 * wi * r2_scale / ((1.0 - t) * (1.0 - t)));
        }
        let h = length_s / n_s as f64;
        let s_nodes = (0..n_s).map(|j| -0.5 * length_s + j as f64 * h).collect();
        Ok(Self {
            r2_nodes,
            r2_weights,
            s_nodes,
            length_s,
            samples: vec![C64::new(0.0, 0.0); n_r * n_s],
        })
    }

    /// The default template (64 r²-nodes, N_s = 4096, L_s = 200).
    pub fn default_template() -> Self {
        Self::template(DEFAULT_NR, 1.0, DEFAULT_NS, DEFAULT_LS).expect("default template is valid")
    }

    /// r²-nodes.
    pub fn r2_nodes(&self) -> &[f64] {
        &self.r2_nodes
    }

    /// Quadrature weights in r².
    pub fn r2_weights(&self) -> &[f64] {
        &self.r2_weights
    }

    /// s-nodes.
    pub fn s_nodes(&self) -> &[f64] {
        &self.s_nodes
    }

    /// Box length L_s.
    pub fn length_s(&self) -> f64 {
        self.length_s
    }

    /// Samples, row-major in (r², s).
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// Sample at (r²-index a, s-index b).
    pub fn at(&self, a: usize, b: usize) -> C64 {
        self.samples[a * self.s_nodes.len() + b]
    }

    /// Largest σ resolved without aliasing, π N_s / L_s.
    pub fn nyquist(&self) -> f64 {
        PI * self.s_nodes.len() as f64 / self.length_s
    }

    fn with_samples(&self, samples: Vec<C64>) -> Self {
        Self {
            samples,
            ..self.clone()
        }
    }

    /// Pointwise a·self + b·other on the same nodes.
    pub fn lin_comb(&self, a: C64, other: &GridField, b: C64) -> Result<GridField> {
        if self.r2_nodes != other.r2_nodes || self.s_nodes != other.s_nodes {
            return Err(HwError::InvalidInput("grid fields on different nodes".into()));
        }
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        ))
    }
}

/// Series-safe periodic sums Σ_{m≠0} (s + mP)^{−q} for q = 1, 2, 3, 4.
fn periodic_tails(s: f64, period: f64) -> [f64; 4] {
    let c = PI / period;
    let x = c * s;
    if x.abs() < 1e-4 {
        return [-c * c * s / 3.0, c * c / 3.0, -c.powi(3) * x / 15.0, c.powi(4) / 45.0];
    }
    let (sn, cs) = x.sin_cos();
    let csc2 = 1.0 / (sn * sn);
    let cot = cs / sn;
    [
        c * cot - 1.0 / s,
        c * c * csc2 - 1.0 / (s * s),
        c.powi(3) * csc2 * cot - 1.0 / s.powi(3),
        c.powi(4) * (2.0 * csc2 * cot * cot + csc2 * csc2) / 3.0 - 1.0 / s.powi(4),
    ]
}

/// Derivatives of g(σ) = f(σ)φ_k(r², σ) at σ = 0 up to order 3: one-sided differences for f,
/// exact Taylor coefficients for φ_k.
fn endpoint_derivatives(band: &Band, r2: f64, h: f64) -> [C64; 4] {
    let f: Vec<C64> = (0..6).map(|n| band.profile.eval(n as f64 * h)).collect();
    let fd = [
        f[0],
        (-137.0 / 60.0 * f[0] + 5.0 * f[1] - 5.0 * f[2] + 10.0 / 3.0 * f[3] - 1.25 * f[4] + 0.2 * f[5]) / h,
        (3.75 * f[0] - 77.0 / 6.0 * f[1] + 107.0 / 6.0 * f[2] - 13.0 * f[3] + 61.0 / 12.0 * f[4] - 5.0 / 6.0 * f[5])
            / (h * h),
        (-4.25 * f[0] + 17.75 * f[1] - 29.5 * f[2] + 24.5 * f[3] - 10.25 * f[4] + 1.75 * f[5]) / (h * h * h),
    ];
    // Taylor coefficients of L_k(2r²σ) and e^{−r²σ}.
    let k = band.k;
    let mut lag = [0.0; 4];
    let mut binom = 1.0;
    let mut fact = 1.0;
    for (j, c) in lag.iter_mut().enumerate() {
        if j > k {
            break;
        }
        if j > 0 {
            binom *= (k + 1 - j) as f64 / j as f64;
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * binom * (2.0 * r2).powi(j as i32) / fact;
    }
    let mut ex = [0.0; 4];
    let mut fact = 1.0;
    for (n, c) in ex.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        *c = (-r2).powi(n as i32) / fact;
    }
    let mut phi = [0.0; 4];
    let mut fact = 1.0;
    for n in 0..4 {
        if n > 0 {
            fact *= n as f64;
        }
        let coef: f64 = (0..=n).map(|j| lag[j] * ex[n - j]).sum();
        phi[n] = fact * coef / PI.sqrt();
    }
    let mut out = [C64::new(0.0, 0.0); 4];
    let choose = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0],
        [1.0, 3.0, 3.0, 1.0],
    ];
    for n in 0..4 {
        for l in 0..=n {
            out[n] += choose[n][l] * fd[l] * phi[n - l];
        }
    }
    out
}

fn band_line_fft(band: &Band, r2: f64, grid: &GridField, fft: &dyn rustfft::Fft<f64>) -> Vec<C64> {
    let n_s = grid.s_nodes.len();
    let m = OVERSAMPLING * n_s;
    let period = OVERSAMPLING as f64 * grid.length_s;
    let dsig = 2.0 * PI / period;
    let f = &band.profile;
    let sigma_max = f.grid().max();
    let mut g = vec![C64::new(0.0, 0.0); m];
    for (n, v) in g.iter_mut().enumerate() {
        let sigma = n as f64 * dsig;
        if sigma <= sigma_max {
            *v = f.eval(sigma) * radial_band(band.k, sigma, r2);
        }
    }
    let derivs = endpoint_derivatives(band, r2, dsig);
    let mut buf: Vec<C64> = g
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let half = if n == 0 { 0.5 } else { 1.0 };
            v * (sign * half * dsig)
        })
        .collect();
    if band.sign == Sign::Minus {
        // e^{−isσ}: evaluate the plus-sign sum at −s by reversing the output index.
        for v in &mut buf {
            *v = v.conj();
        }
    }
    fft.process(&mut buf);
    if band.sign == Sign::Minus {
        for v in &mut buf {
            *v = v.conj();
        }
    }
    let offset = (OVERSAMPLING - 1) * n_s / 2;
    let norm = 1.0 / (2.0 * PI).sqrt();
    let i = C64::i();
    (0..n_s)
        .map(|b| {
            let s = grid.s_nodes[b];
            let e = if band.sign == Sign::Plus { s } else { -s };
            let [s1, s2, s3, s4] = periodic_tails(e, period);
            let tail = i * derivs[0] * s1 - derivs[1] * s2 - i * derivs[2] * s3 + derivs[3] * s4;
            let t = buf[offset + b];
            norm * (t - tail)
        })
        .collect()
}

/// Real-space samples of u on the template's nodes.
///
/// Closed-form bands are evaluated exactly; sampled bands use an oversampled inverse FFT in s
/// with endpoint corrections for the jump at σ = 0.
pub fn synthesize(u: &BandField, template: &GridField) -> Result<GridField> {
    let n_s = template.s_nodes.len();
    let n_r = template.r2_nodes.len();
    let mut samples = vec![C64::new(0.0, 0.0); n_r * n_s];
    for band in u.bands() {
        let f = &band.profile;
        match f.closed_form() {
            Some(form) => {
                let form = match band.sign {
                    Sign::Plus => form.clone(),
                    Sign::Minus => form.conj(),
                };
                samples.par_chunks_mut(n_s).enumerate().for_each(|(a, row)| {
                    let r2 = template.r2_nodes[a];
                    for (b, v) in row.iter_mut().enumerate() {
                        let s = template.s_nodes[b];
                        *v += match band.sign {
                            Sign::Plus => form.band_plus(band.k, r2, s),
                            Sign::Minus => form.band_plus(band.k, r2, s).conj(),
                        };
                    }
                });
            }
            None => {
                let sigma_max = f.grid().max();
                if sigma_max > template.nyquist() {
                    return Err(HwError::AliasError {
                        sigma_max,
                        nyquist: template.nyquist(),
                    });
                }
                let m = OVERSAMPLING * n_s;
                let fft = FftPlanner::new().plan_fft_inverse(m);
                samples.par_chunks_mut(n_s).enumerate().for_each(|(a, row)| {
                    let line = band_line_fft(band, template.r2_nodes[a], template, fft.as_ref());
                    for (v, l) in row.iter_mut().zip(line) {
                        *v += l;
                    }
                });
            }
        }
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(HwError::NonFinite {
            what: "synthesized field",
        });
    }
    Ok(template.with_samples(samples))
}

/// ‖u‖_{L⁴} = (π ∫∫ |u|⁴ d(r²) ds)^{1/4} over the box.
///
/// Fails with a truncation warning when |u|⁴ on the box boundary exceeds 1e−6 of its maximum.
pub fn l4_norm_grid(g: &GridField) -> Result<f64> {
    let n_s = g.s_nodes.len();
    let n_r = g.r2_nodes.len();
    let ds = g.length_s / n_s as f64;
    let mut total = 0.0;
    let mut peak: f64 = 0.0;
    let mut edge: f64 = 0.0;
    for a in 0..n_r {
        for b in 0..n_s {
            let q = g.at(a, b).norm_sqr().powi(2);
            total += g.r2_weights[a] * ds * q;
            peak = peak.max(q);
            if b == 0 || a == n_r - 1 {
                edge = edge.max(q);
            }
        }
    }
    if peak > 0.0 && edge > DECAY_RATIO * peak {
        return Err(HwError::TruncationWarning(format!(
            "|u|⁴ on the box boundary is {:.3e} of its maximum",
            edge / peak
        )));
    }
    Ok((PI * total).powf(0.25))
}

/// Least-squares fit of grid samples by Laguerre profiles of scale α and modulation t,
/// `nj` coefficients per band, on the listed bands.
pub fn analyze(
    g: &GridField,
    alpha: f64,
    shift: f64,
    nj: usize,
    bands: &[(usize, Sign)],
    sigma_grid: Arc<SigmaGrid>,
) -> Result<BandField> {
    if bands.is_empty() || nj == 0 {
        return Err(HwError::InvalidInput(
            "analysis needs at least one band and one coefficient".into(),
        ));
    }
    let kmax = bands.iter().map(|b| b.0).max().unwrap_or(0);
    let n = nj * bands.len();
    let n_s = g.s_nodes.len();
    let ds = g.length_s / n_s as f64;
    let partial: Vec<(DMatrix<C64>, DVector<C64>)> = (0..g.r2_nodes.len())
        .into_par_iter()
        .map(|a| {
            let r2 = g.r2_nodes[a];
            let mut gram = DMatrix::<C64>::zeros(n, n);
            let mut rhs = DVector::<C64>::zeros(n);
            let mut col = vec![C64::new(0.0, 0.0); n];
            for b in 0..n_s {
                let s = g.s_nodes[b];
                let tp = laguerre_band_table(alpha, shift, nj, kmax + 1, r2, s);
                let tm = laguerre_band_table(alpha, -shift, nj, kmax + 1, r2, s);
                for (bi, (k, sign)) in bands.iter().enumerate() {
                    for j in 0..nj {
                        col[bi * nj + j] = match sign {
                            Sign::Plus => tp[j * (kmax + 1) + k],
                            Sign::Minus => tm[j * (kmax + 1) + k].conj(),
                        };
                    }
                }
                let w = g.r2_weights[a] * ds;
                let y = g.at(a, b);
                for p in 0..n {
                    let cp = col[p].conj() * w;
                    rhs[p] += cp * y;
                    for q in 0..n {
                        gram[(p, q)] += cp * col[q];
                    }
                }
            }
            (gram, rhs)
        })
        .collect();
    let mut gram = DMatrix::<C64>::zeros(n, n);
    let mut rhs = DVector::<C64>::zeros(n);
    for (m, v) in partial {
        gram += m;
        rhs += v;
    }
    let chol = gram.cholesky().ok_or(HwError::SingularSystem(0.0))?;
    let c = chol.solve(&rhs);
    let mut out = Vec::with_capacity(bands.len());
    for (bi, (k, sign)) in bands.iter().enumerate() {
        let coeffs = (0..nj).map(|j| c[bi * nj + j]).collect();
        let profile = SigmaProfile::from_closed(sigma_grid.clone(), ClosedForm::Laguerre { alpha, shift, coeffs })?;
        out.push(Band {
            k: *k,
            sign: *sign,
            profile,
        });
    }
    BandField::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qplus_field() -> BandField {
        let grid = Arc::new(SigmaGrid::default_grid());
        let f = SigmaProfile::from_closed(
            grid,
            ClosedForm::Exponential {
                k: C64::new(2.0 * PI, 0.0),
                alpha: 1.0,
            },
        )
        .unwrap();
        BandField::single(0, Sign::Plus, f)
    }

    fn qplus(r2: f64, s: f64) -> C64 {
        C64::new(0.0, 2f64.sqrt()) / C64::new(s, r2 + 1.0)
    }

    #[test]
    fn synthesizes_the_limiting_profile() {
        let t = GridField::template(16, 1.0, 512, 100.0).unwrap();
        let g = synthesize(&qplus_field(), &t).unwrap();
        for a in 0..16 {
            for b in (0..512).step_by(7) {
                let e = qplus(t.r2_nodes()[a], t.s_nodes()[b]);
                assert!((g.at(a, b) - e).norm() <= 1e-6 * e.norm());
            }
        }
    }

    #[test]
    fn fft_route_matches_exact_route() {
        let t = GridField::template(8, 1.0, 1024, 100.0).unwrap();
        let grid = Arc::new(SigmaGrid::log_spaced(1e-4, 30.0, 512).unwrap());
        let form = ClosedForm::Laguerre {
            alpha: 1.0,
            shift: 0.2,
            coeffs: vec![C64::new(1.0, 0.0), C64::new(0.3, -0.2), C64::new(0.0, 0.4)],
        };
        for (k, sign) in [(0, Sign::Plus), (2, Sign::Minus)] {
            let exact = BandField::single(k, sign, SigmaProfile::from_closed(grid.clone(), form.clone()).unwrap());
            let sampled = BandField::single(
                k,
                sign,
                SigmaProfile::from_closed(grid.clone(), form.clone())
                    .unwrap()
                    .into_sampled(),
            );
            let a = synthesize(&exact, &t).unwrap();
            let b = synthesize(&sampled, &t).unwrap();
            let peak = a.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = a
                .samples()
                .iter()
                .zip(b.samples())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-6 * peak, "k={k} {sign:?}: {err} vs {peak}");
        }
    }

    #[test]
    fn aliasing_is_detected() {
        let t = GridField::template(4, 1.0, 64, 100.0).unwrap();
        let u = qplus_field();
        let s = BandField::single(0, Sign::Plus, u.bands()[0].profile.clone().into_sampled());
        assert!(matches!(synthesize(&s, &t), Err(HwError::AliasError { .. })));
    }

    #[test]
    fn zero_field_and_linearity() {
        let t = GridField::template(6, 1.0, 256, 60.0).unwrap();
        let z = synthesize(&BandField::default(), &t).unwrap();
        assert!(z.samples().iter().all(|v| v.norm() == 0.0));
        let grid = Arc::new(SigmaGrid::default_grid());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let c1 = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let c2 = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let f = SigmaProfile::from_closed(grid.clone(), ClosedForm::Exponential { k: c1, alpha: 1.3 }).unwrap();
            let h = SigmaProfile::from_closed(grid.clone(), ClosedForm::Exponential { k: c2, alpha: 0.8 }).unwrap();
            let a = synthesize(&BandField::single(1, Sign::Minus, f.clone()), &t).unwrap();
            let b = synthesize(&BandField::single(1, Sign::Minus, h.clone()), &t).unwrap();
            let sum = SigmaProfile::lin_comb(C64::new(2.0, 0.0), &f, C64::new(-1.0, 0.0), &h).unwrap();
            let c = synthesize(&BandField::single(1, Sign::Minus, sum), &t).unwrap();
            let d = a.lin_comb(C64::new(2.0, 0.0), &b, C64::new(-1.0, 0.0)).unwrap();
            let err = c
                .samples()
                .iter()
                .zip(d.samples())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn l4_norm_of_the_limiting_profile() {
        // Truncating the box at |s| = L/2 loses about π²/L² of ∫|Q₊|⁴ relative to π².
        for (n_s, l) in [(4096, 200.0), (16384, 800.0)] {
            let t = GridField::template(48, 1.0, n_s, l).unwrap();
            let g = synthesize(&qplus_field(), &t).unwrap();
            let l4 = l4_norm_grid(&g).unwrap().powi(4);
            let loss = 4.0 / (l * l);
            assert!((l4 / (PI * PI) - 1.0 + loss).abs() < 0.1 * loss, "{l4}");
        }
        let small = GridField::template(8, 1.0, 64, 4.0).unwrap();
        let g = synthesize(&qplus_field(), &small).unwrap();
        assert!(matches!(l4_norm_grid(&g), Err(HwError::TruncationWarning(_))));
    }

    #[test]
    fn analysis_inverts_synthesis() {
        let t = GridField::template(24, 1.0, 512, 80.0).unwrap();
        let grid = Arc::new(SigmaGrid::default_grid());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bands = [(0, Sign::Plus), (1, Sign::Plus), (0, Sign::Minus)];
        let mut list = Vec::new();
        for &(k, sign) in &bands {
            let coeffs: Vec<C64> = (0..4)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let form = ClosedForm::Laguerre {
                alpha: 1.0,
                shift: 0.0,
                coeffs,
            };
            list.push(Band {
                k,
                sign,
                profile: SigmaProfile::from_closed(grid.clone(), form).unwrap(),
            });
        }
        let u = BandField::new(list).unwrap();
        let g = synthesize(&u, &t).unwrap();
        let v = analyze(&g, 1.0, 0.0, 4, &bands, grid).unwrap();
        for (a, b) in u.bands().iter().zip(v.bands()) {
            let (Some(ClosedForm::Laguerre { coeffs: ca, .. }), Some(ClosedForm::Laguerre { coeffs: cb, .. })) =
                (a.profile.closed_form(), b.profile.closed_form())
            else {
                panic!("expected Laguerre forms");
            };
            for (x, y) in ca.iter().zip(cb) {
                assert!((x - y).norm() < 1e-8, "{x} vs {y}");
            }
        }
    }
}
