//! Laguerre–Galerkin discretization of radial fields on ℍ¹ for the traveling-wave problem.
//!
//! A radial field is expanded as u = Σ_{k<K, j<J} c⁺_{kj} G_{kj} + c⁻_{kj} Ḡ_{kj}, where G_{kj} is
//! band k with positive sign and Laguerre profile ℓ_j(σ) = √2 L_j(2σ) e^{−σ}, and Ḡ_{kj} is the
//! matching band with negative sign. The profiles ℓ_j are orthonormal in L²(dσ), so
//! quadratic forms are diagonal in the coefficients. Quartic and cubic terms are integrated
//! on a graded cubature of the (x² + y², s) half-plane, where dx dy = π d(x² + y²).

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{HwError, Result};
use crate::numerics::{QuadratureSpec, C64};
use crate::spectral::{
    laguerre_band_table, laguerre_values, Band, BandField, ClosedForm, SigmaGrid, SigmaProfile, Sign, UhpCubature,
};

/// A Laguerre–Galerkin basis together with its cubature.
#[derive(Debug, Clone)]
pub struct LaguerreGalerkin {
    nj: usize,
    nk: usize,
    order: usize,
    rule: UhpCubature,
    /// Re G and Im G at the cubature points, P × KJ.
    gr: DMatrix<f64>,
    gi: DMatrix<f64>,
    /// Transposes, KJ × P.
    grt: DMatrix<f64>,
    git: DMatrix<f64>,
}

/// Complex blocks G^H X G and G^H X Ḡ for a real diagonal weight X.
struct Grams {
    herm: DMatrix<C64>,
    sym: DMatrix<C64>,
}

impl LaguerreGalerkin {
    /// Basis with `nj` Laguerre functions in each of `nk` bands per sign, on a graded cubature
    /// of odd order `order` in each direction.
    pub fn new(nj: usize, nk: usize, order: usize) -> Result<Self> {
        if nj < 2 || nk < 1 || order < 3 {
            return Err(HwError::InvalidInput(format!(
                "Galerkin basis needs J ≥ 2, K ≥ 1 and cubature order ≥ 3, got ({nj}, {nk}, {order})"
            )));
        }
        let rule = UhpCubature::new(order, order);
        let p = rule.len();
        let n = nj * nk;
        let mut gr = DMatrix::zeros(p, n);
        let mut gi = DMatrix::zeros(p, n);
        for (row, z) in rule.points().iter().enumerate() {
            let table = laguerre_band_table(1.0, 0.0, nj, nk, z.im, z.re);
            for j in 0..nj {
                for k in 0..nk {
                    let v = table[j * nk + k];
                    gr[(row, k * nj + j)] = v.re;
                    gi[(row, k * nj + j)] = v.im;
                }
            }
        }
        let grt = gr.transpose();
        let git = gi.transpose();
        Ok(Self {
            nj,
            nk,
            order,
            rule,
            gr,
            gi,
            grt,
            git,
        })
    }

    /// Laguerre functions per band.
    pub fn nj(&self) -> usize {
        self.nj
    }

    /// Bands per sign.
    pub fn nk(&self) -> usize {
        self.nk
    }

    /// Cubature order.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of complex coefficients 2KJ.
    pub fn dim(&self) -> usize {
        2 * self.nj * self.nk
    }

    /// Position of coefficient (sign, k, j).
    pub fn index(&self, sign: Sign, k: usize, j: usize) -> usize {
        let base = match sign {
            Sign::Plus => 0,
            Sign::Minus => self.nj * self.nk,
        };
        base + k * self.nj + j
    }

    /// (sign, k, j) of coefficient m.
    pub fn label(&self, m: usize) -> (Sign, usize, usize) {
        let n = self.nj * self.nk;
        let sign = if m < n { Sign::Plus } else { Sign::Minus };
        let r = m % n;
        (sign, r / self.nj, r % self.nj)
    }

    /// ⟨−(Δ_ℍ + βD_s)·, ·⟩ weights ((2k+1) − εβ)/2.
    pub fn form_weights(&self, beta: f64) -> Vec<f64> {
        (0..self.dim())
            .map(|m| {
                let (sign, k, _) = self.label(m);
                0.5 * ((2 * k + 1) as f64 - beta * sign.as_f64())
            })
            .collect()
    }

    /// Ḣ¹ weights (2k+1)/2.
    pub fn h1_weights(&self) -> Vec<f64> {
        self.form_weights(0.0)
    }

    /// The cubature.
    pub fn rule(&self) -> &UhpCubature {
        &self.rule
    }

    /// Field values at the cubature points.
    pub fn synthesize(&self, c: &[C64]) -> Vec<C64> {
        let n = self.nj * self.nk;
        let (cp, cm) = c.split_at(n);
        let pr = DVector::from_iterator(n, cp.iter().map(|v| v.re));
        let pi = DVector::from_iterator(n, cp.iter().map(|v| v.im));
        let mr = DVector::from_iterator(n, cm.iter().map(|v| v.re));
        let mi = DVector::from_iterator(n, cm.iter().map(|v| v.im));
        // (Gr + iGi)(pr + i pi) + (Gr − iGi)(mr + i mi)
        let sr = &pr + &mr;
        let si = &pi + &mi;
        let dr = &pr - &mr;
        let di = &pi - &mi;
        let re = &self.gr * &sr - &self.gi * &di;
        let im = &self.gr * &si + &self.gi * &dr;
        re.iter().zip(im.iter()).map(|(a, b)| C64::new(*a, *b)).collect()
    }

    /// B^* (weights·values): the Galerkin projection coefficients Σ_P w v conj(basis).
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let w = self.rule.weights();
        let p = w.len();
        let vr = DVector::from_iterator(p, v.iter().zip(w).map(|(v, w)| v.re * w));
        let vi = DVector::from_iterator(p, v.iter().zip(w).map(|(v, w)| v.im * w));
        let a = &self.grt * &vr;
        let b = &self.git * &vi;
        let c = &self.grt * &vi;
        let d = &self.git * &vr;
        // plus: Σ conj(G) v = (a + b) + i(c − d); minus: Σ G v = (a − b) + i(c + d)
        let n = self.nj * self.nk;
        let mut out = Vec::with_capacity(2 * n);
        out.extend((0..n).map(|m| C64::new(a[m] + b[m], c[m] - d[m])));
        out.extend((0..n).map(|m| C64::new(a[m] - b[m], c[m] + d[m])));
        out
    }

    /// ‖u‖⁴_{L⁴} = π Σ w |u|⁴.
    pub fn l4_fourth(&self, u: &[C64]) -> f64 {
        PI * self
            .rule
            .weights()
            .iter()
            .zip(u)
            .map(|(w, v)| w * v.norm_sqr().powi(2))
            .sum::<f64>()
    }

    /// Galerkin coefficients of |u|²u, i.e. (|u|²u, basis)_{L²}.
    pub fn cubic(&self, u: &[C64]) -> Vec<C64> {
        let v: Vec<C64> = u.iter().map(|u| u * u.norm_sqr() * PI).collect();
        self.project(&v)
    }

    fn grams(&self, x: &[f64]) -> Grams {
        let mut xgr = self.gr.clone();
        let mut xgi = self.gi.clone();
        for (row, xv) in x.iter().enumerate() {
            xgr.row_mut(row).scale_mut(*xv);
            xgi.row_mut(row).scale_mut(*xv);
        }
        let p1 = &self.grt * &xgr;
        let p2 = &self.git * &xgi;
        let p3 = &self.grt * &xgi;
        let n = p1.nrows();
        let herm = DMatrix::from_fn(n, n, |a, b| C64::new(p1[(a, b)] + p2[(a, b)], p3[(a, b)] - p3[(b, a)]));
        let sym = DMatrix::from_fn(n, n, |a, b| {
            C64::new(p1[(a, b)] - p2[(a, b)], -(p3[(a, b)] + p3[(b, a)]))
        });
        Grams { herm, sym }
    }

    /// Complex matrices A = 2π B^*(W|u|²)B and Bm = π B^*(Wu²)B̄ of the linearized cubic term:
    /// the coefficients of 2|u|²h + u²h̄ are A h + Bm h̄.
    pub fn cubic_linearization(&self, u: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        let w = self.rule.weights();
        let n = self.nj * self.nk;
        let m = 2 * n;
        let x: Vec<f64> = u.iter().zip(w).map(|(u, w)| 2.0 * PI * w * u.norm_sqr()).collect();
        let yr: Vec<f64> = u.iter().zip(w).map(|(u, w)| PI * w * (u * u).re).collect();
        let yi: Vec<f64> = u.iter().zip(w).map(|(u, w)| PI * w * (u * u).im).collect();
        let gx = self.grams(&x);
        let gr = self.grams(&yr);
        let gi = self.grams(&yi);
        let i = C64::i();
        let mut a = DMatrix::zeros(m, m);
        let mut b = DMatrix::zeros(m, m);
        for r in 0..n {
            for c in 0..n {
                a[(r, c)] = gx.herm[(r, c)];
                a[(r, c + n)] = gx.sym[(r, c)];
                a[(r + n, c)] = gx.sym[(r, c)].conj();
                a[(r + n, c + n)] = gx.herm[(r, c)].conj();
                let hy = gr.herm[(r, c)] + i * gi.herm[(r, c)];
                let hyc = gr.herm[(r, c)] - i * gi.herm[(r, c)];
                let sy = gr.sym[(r, c)] + i * gi.sym[(r, c)];
                let syc = gr.sym[(r, c)] - i * gi.sym[(r, c)];
                b[(r, c)] = sy;
                b[(r, c + n)] = hy;
                b[(r + n, c)] = hyc.conj();
                b[(r + n, c + n)] = syc.conj();
            }
        }
        (a, b)
    }

    /// Field value at (r², s) off the cubature.
    pub fn value_at(&self, c: &[C64], r2: f64, s: f64) -> C64 {
        let table = laguerre_band_table(1.0, 0.0, self.nj, self.nk, r2, s);
        let n = self.nj * self.nk;
        let mut v = C64::new(0.0, 0.0);
        for j in 0..self.nj {
            for k in 0..self.nk {
                let g = table[j * self.nk + k];
                let m = k * self.nj + j;
                v += c[m] * g + c[m + n] * g.conj();
            }
        }
        v
    }

    /// The field as bands with Laguerre closed-form profiles sampled on `grid`.
    pub fn to_band_field(&self, c: &[C64], grid: Arc<SigmaGrid>) -> Result<BandField> {
        let mut bands = Vec::new();
        for sign in [Sign::Plus, Sign::Minus] {
            for k in 0..self.nk {
                let coeffs: Vec<C64> = (0..self.nj).map(|j| c[self.index(sign, k, j)]).collect();
                let form = ClosedForm::Laguerre {
                    alpha: 1.0,
                    shift: 0.0,
                    coeffs,
                };
                bands.push(Band {
                    k,
                    sign,
                    profile: SigmaProfile::from_closed(grid.clone(), form)?,
                });
            }
        }
        BandField::new(bands)
    }

    /// Coefficients of the Ḣ¹-orthogonal projection of a band field onto the basis.
    pub fn coefficients_of(&self, u: &BandField, spec: &QuadratureSpec) -> Result<Vec<C64>> {
        let mut c = vec![C64::new(0.0, 0.0); self.dim()];
        for b in u.bands() {
            if b.k >= self.nk {
                continue;
            }
            if let Some(ClosedForm::Laguerre { alpha, shift, coeffs }) = b.profile.closed_form() {
                if *alpha == 1.0 && *shift == 0.0 {
                    for (j, v) in coeffs.iter().enumerate().take(self.nj) {
                        c[self.index(b.sign, b.k, j)] = *v;
                    }
                    continue;
                }
            }
            for j in 0..self.nj {
                let v = b.profile.integral(
                    |s, f| {
                        let mut l = Vec::with_capacity(j + 1);
                        laguerre_values(j + 1, 2.0 * s, &mut l);
                        f * (2f64.sqrt() * l[j] * (-s).exp())
                    },
                    spec,
                    "Laguerre coefficient",
                )?;
                c[self.index(b.sign, b.k, j)] = v;
            }
        }
        Ok(c)
    }

    /// Coefficients of ∂ₛu: the profile of band (k, ε) is multiplied by iεσ, and
    /// σℓ_j = ½(−(j+1)ℓ_{j+1} + (2j+1)ℓ_j − jℓ_{j−1}) truncated to the basis.
    pub fn d_s(&self, c: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); c.len()];
        for m in 0..c.len() {
            let (sign, k, j) = self.label(m);
            let f = C64::new(0.0, sign.as_f64()) * c[m] * 0.5;
            out[m] += f * (2 * j + 1) as f64;
            if j + 1 < self.nj {
                out[self.index(sign, k, j + 1)] -= f * (j + 1) as f64;
            }
            if j > 0 {
                out[self.index(sign, k, j - 1)] -= f * j as f64;
            }
        }
        out
    }
}

impl LaguerreGalerkin {
    /// Real matrix of h ↦ D h − (2|u|²h + u²h̄) on x = (Re c, Im c), for the diagonal D.
    pub fn linearized_real(&self, u: &[C64], d: &[f64]) -> DMatrix<f64> {
        let (a, b) = self.cubic_linearization(u);
        let m = self.dim();
        let mut jr = DMatrix::zeros(2 * m, 2 * m);
        for r in 0..m {
            for c in 0..m {
                let diag = if r == c { d[r] } else { 0.0 };
                let m1 = C64::new(diag, 0.0) - a[(r, c)] - b[(r, c)];
                let m2 = C64::new(diag, 0.0) - a[(r, c)] + b[(r, c)];
                jr[(r, c)] = m1.re;
                jr[(r, c + m)] = -m2.im;
                jr[(r + m, c)] = m1.im;
                jr[(r + m, c + m)] = m2.re;
            }
        }
        jr
    }
}

/// Stacks complex coefficients as (Re c, Im c).
pub fn to_real(c: &[C64]) -> DVector<f64> {
    let m = c.len();
    DVector::from_fn(2 * m, |i, _| if i < m { c[i].re } else { c[i - m].im })
}

/// Inverse of [`to_real`].
pub fn from_real(x: &DVector<f64>) -> Vec<C64> {
    let m = x.len() / 2;
    (0..m).map(|i| C64::new(x[i], x[i + m])).collect()
}
