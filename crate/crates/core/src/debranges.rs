//! Pairs `(b, a)`, Toeplitz actions and the de Branges–Rovnyak norm.
//!
//! A pair is built from a symbol `phi = p/q` without poles in the open disk.
//! The outer factor is `a = q e^h`, where `h` is the analytic completion of
//! `-log(|p|^2 + |q|^2) / 2` on the boundary grid, and `b = p e^h`. Working
//! with `p` and `q` separately keeps the construction finite when `phi` has a
//! pole on the circle.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::series::{
    boundary_samples, fourier_coefficients, samples_to_coeffs, series_division, synthesize, BoundarySamples,
    ComplexPoly, RationalFn, DEFAULT_BOUNDARY_GRID, POLE_MARGIN,
};
use crate::trace;
use crate::{Error, Result, C64};

/// Default Taylor truncation of `a` and `b`.
pub const DEFAULT_PAIR_TRUNCATION: usize = 256;

/// Values of `1 - |b|^2` below this are excluded from the log-integral.
pub const EXTREME_FLOOR: f64 = 1e-14;

/// Smallest admissible `a(0)`.
pub const MIN_A0: f64 = 1e-12;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairBA {
    a: ComplexPoly,
    b: ComplexPoly,
    a_samples: BoundarySamples,
    b_samples: BoundarySamples,
    phi: RationalFn,
}

/// How far a constructed pair is from satisfying its defining identities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairDiagnostics {
    /// `max_j | |a|^2 + |b|^2 - 1 |`.
    pub identity: f64,
    /// `max_j |b|`.
    pub b_sup: f64,
    /// `max_j |b q - a p| / (|p| + |q|)` with `phi = p/q`.
    pub symbol_mismatch: f64,
    /// `|Im a(0)|`.
    pub a0_imag: f64,
    pub a0: f64,
}

impl PairBA {
    /// Taylor coefficients of `a` through degree `N`.
    pub fn a(&self) -> &ComplexPoly {
        &self.a
    }

    pub fn b(&self) -> &ComplexPoly {
        &self.b
    }

    pub fn a_samples(&self) -> &BoundarySamples {
        &self.a_samples
    }

    pub fn b_samples(&self) -> &BoundarySamples {
        &self.b_samples
    }

    pub fn phi(&self) -> &RationalFn {
        &self.phi
    }

    /// Taylor truncation degree.
    pub fn truncation(&self) -> usize {
        self.a.coeffs().len() - 1
    }

    /// Boundary grid size.
    pub fn grid(&self) -> usize {
        self.a_samples.len()
    }

    pub fn diagnostics(&self) -> PairDiagnostics {
        let (mut identity, mut b_sup, mut mismatch) = (0.0f64, 0.0f64, 0.0f64);
        let (num, den) = (self.phi.num(), self.phi.den());
        for (j, (a, b)) in self.a_samples.values().iter().zip(self.b_samples.values()).enumerate() {
            identity = identity.max((a.norm_sqr() + b.norm_sqr() - 1.0).abs());
            b_sup = b_sup.max(b.norm());
            let l = self.a_samples.node(j);
            let (p, q) = (num.eval(l), den.eval(l));
            mismatch = mismatch.max((b * q - a * p).norm() / (p.norm() + q.norm()));
        }
        let a0 = self.a.coeff(0);
        PairDiagnostics {
            identity,
            b_sup,
            symbol_mismatch: mismatch,
            a0_imag: a0.im.abs(),
            a0: a0.re,
        }
    }

    /// JSON export `{"phi", "M", "N", "a", "b"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "phi": self.phi,
            "M": self.grid(),
            "N": self.truncation(),
            "a": self.a,
            "b": self.b,
        })
    }
}

fn check_symbol(phi: &RationalFn) -> Result<()> {
    if phi.min_pole_modulus() < 1.0 - POLE_MARGIN {
        return Err(phi.pole_error("open unit disk"));
    }
    Ok(())
}

/// The pair whose symbol is `phi`, sampled on `m` boundary points and
/// truncated at degree `n`.
pub fn pair_from_phi(phi: &RationalFn, m: usize, n: usize) -> Result<PairBA> {
    trace::record("pair_from_phi");
    check_symbol(phi)?;
    if n >= m / 2 {
        return Err(Error::Truncation {
            requested: n,
            available: m / 2 - 1,
        });
    }
    // Rotate p and q together so that q(0) > 0; then a(0) = q(0) e^{h(0)}.
    let q0 = phi.den().coeff(0);
    let unit = q0.conj() / q0.norm();
    let p = boundary_samples(|z| phi.num().eval(z) * unit, m)?;
    let q = boundary_samples(|z| phi.den().eval(z) * unit, m)?;

    let log_mod: Vec<C64> = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(p, q)| C64::new(-0.5 * (p.norm_sqr() + q.norm_sqr()).ln(), 0.0))
        .collect();
    let mut spec = fourier_coefficients(&log_mod);
    spec[0] = C64::new(spec[0].re, 0.0);
    for c in &mut spec[1..m / 2] {
        *c *= 2.0;
    }
    spec[m / 2] = C64::new(spec[m / 2].re, 0.0);
    for c in &mut spec[m / 2 + 1..] {
        *c = zero();
    }
    let h = synthesize(&spec);

    let scale: Vec<C64> = h.iter().map(|h| h.exp()).collect();
    let a_samples = BoundarySamples::new(q.values().iter().zip(&scale).map(|(q, e)| q * e).collect())?;
    let b_samples = BoundarySamples::new(p.values().iter().zip(&scale).map(|(p, e)| p * e).collect())?;
    let mut a = samples_to_coeffs(&a_samples, n)?;
    let b = samples_to_coeffs(&b_samples, n)?;
    let a0 = a.coeff(0);
    if a0.re <= MIN_A0 {
        return Err(Error::DegeneratePair(a0.re));
    }
    let mut ac = a.coeffs().to_vec();
    ac[0] = C64::new(a0.re, 0.0);
    a = ComplexPoly::new(ac);
    Ok(PairBA {
        a,
        b,
        a_samples,
        b_samples,
        phi: phi.clone(),
    })
}

/// The symbol `z / (1 - conj(zeta) z)`.
pub fn point_symbol(zeta: C64) -> Result<RationalFn> {
    if zeta.norm() > 1.0 + POLE_MARGIN {
        return Err(Error::OutsideClosedDisk(zeta));
    }
    RationalFn::symbol(
        ComplexPoly::new(vec![zero(), one()]),
        ComplexPoly::new(vec![one(), -zeta.conj()]),
    )
}

/// Constants `(A, B)` with `b = z/(A - Bz)`, `a = (1 - conj(zeta) z)/(A - Bz)`.
///
/// `A > 0`, `A B = conj(zeta)` and `A^2 + |B|^2 = 2 + |zeta|^2`; `B = 0` at
/// `zeta = 0`.
pub fn closed_form_constants(zeta: C64) -> (f64, C64) {
    let s = zeta.norm_sqr();
    let t = 2.0 + s + (4.0 + s * s).sqrt();
    let a = (t / 2.0).sqrt();
    let b = zeta.conj() * (2.0 / t).sqrt();
    (a, b)
}

/// [`pair_closed_form_with`] on the default grid and truncation.
pub fn pair_closed_form(zeta: C64) -> Result<PairBA> {
    pair_closed_form_with(zeta, DEFAULT_BOUNDARY_GRID, DEFAULT_PAIR_TRUNCATION)
}

/// The pair of the symbol `z / (1 - conj(zeta) z)` from its explicit formula.
pub fn pair_closed_form_with(zeta: C64, m: usize, n: usize) -> Result<PairBA> {
    trace::record("pair_closed_form");
    let phi = point_symbol(zeta)?;
    let (big_a, big_b) = closed_form_constants(zeta);
    let den = ComplexPoly::new(vec![C64::new(big_a, 0.0), -big_b]);
    let a_num = phi.den().clone();
    let b_num = phi.num().clone();
    let a = series_division(&a_num, &den, n);
    let b = series_division(&b_num, &den, n);
    let a_samples = boundary_samples(|z| a_num.eval(z) / den.eval(z), m)?;
    let b_samples = boundary_samples(|z| b_num.eval(z) / den.eval(z), m)?;
    Ok(PairBA {
        a,
        b,
        a_samples,
        b_samples,
        phi,
    })
}

/// `T_conj(h) f`: coefficient `n` is `sum_{j>=0} conj(h_j) f_{n+j}`, for
/// `0 <= n <= n_max`.
pub fn toeplitz_conj_apply(h: &ComplexPoly, f: &ComplexPoly, n_max: usize) -> ComplexPoly {
    trace::record("toeplitz_conj_apply");
    let hc = h.coeffs();
    let fc = f.coeffs();
    let out = (0..=n_max)
        .map(|n| {
            hc.iter()
                .zip(fc.iter().skip(n))
                .map(|(h, f)| h.conj() * f)
                .sum()
        })
        .collect();
    ComplexPoly::new(out)
}

/// Solves `T_conj(b) f = T_conj(a) g` for `g` on coefficients `0..=n`.
///
/// The section of `T_conj(a)` is upper triangular with diagonal `a(0)`, so
/// the system is solved by back substitution from coefficient `n` down.
pub fn f_plus(f: &ComplexPoly, pair: &PairBA, n: usize) -> Result<ComplexPoly> {
    trace::record("f_plus");
    if n > pair.truncation() {
        return Err(Error::Truncation {
            requested: n,
            available: pair.truncation(),
        });
    }
    let a0 = pair.a.coeff(0).re;
    if a0 <= MIN_A0 {
        return Err(Error::DegeneratePair(a0));
    }
    let rhs = toeplitz_conj_apply(&pair.b, f, n);
    let ac: Vec<C64> = pair.a.coeffs().iter().map(|c| c.conj()).collect();
    let mut g = vec![zero(); n + 1];
    for k in (0..=n).rev() {
        let mut acc = rhs.coeff(k);
        for j in 1..=(n - k).min(ac.len() - 1) {
            acc -= ac[j] * g[k + j];
        }
        g[k] = acc / a0;
    }
    Ok(ComplexPoly::new(g))
}

/// `||f||_{H^2}^2 + ||f^+||_{H^2}^2`, solving for `f^+` at the degree of
/// `f` (capped at the pair truncation). Exact for polynomials.
pub fn hb_norm_sq(f: &ComplexPoly, pair: &PairBA) -> Result<f64> {
    trace::record("hb_norm_sq");
    let n = f.degree().min(pair.truncation());
    let g = f_plus(f, pair, n)?;
    Ok(f.h2_norm_sq() + g.h2_norm_sq())
}

/// `||k_w^+||^2 = |phi(w)|^2 / (1 - |w|^2)`, from `k_w^+ = conj(phi(w)) k_w`.
pub fn kernel_plus_norm_sq(phi: &RationalFn, w: C64) -> f64 {
    phi.eval(w).norm_sqr() / (1.0 - w.norm_sqr())
}

/// `k_w^b(z) = (1 - conj(b(w)) b(z)) / (1 - conj(w) z)`.
pub fn hb_kernel(pair: &PairBA, w: C64, z: C64) -> Result<C64> {
    trace::record("hb_kernel");
    for p in [w, z] {
        if p.norm() >= 1.0 {
            return Err(Error::OutsideDisk(p));
        }
    }
    let (bw, bz) = (pair.b.eval(w), pair.b.eval(z));
    Ok((one() - bw.conj() * bz) / (one() - w.conj() * z))
}

/// Gram matrix `G[i][j] = k^b_{z_j}(z_i)`.
pub fn gram_matrix(pair: &PairBA, points: &[C64]) -> Result<DMatrix<C64>> {
    let n = points.len();
    let mut g = DMatrix::from_element(n, n, zero());
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = hb_kernel(pair, points[j], points[i])?;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of the Hermitian part of a square matrix.
pub fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NonExtremeReport {
    pub nonextreme: bool,
    /// Trimmed mean of `log(1 - |b|^2)` on the `M`-point grid.
    pub log_integral: f64,
    /// Samples where `1 - |b|^2 < EXTREME_FLOOR`.
    pub excluded: usize,
}

fn trimmed_log_mean(b: &ComplexPoly, m: usize) -> Result<(f64, usize)> {
    let s = boundary_samples(|z| b.eval(z), m)?;
    let mut terms = Vec::with_capacity(m);
    for v in s.values() {
        let d = 1.0 - v.norm_sqr();
        if d >= EXTREME_FLOOR {
            terms.push(d.ln());
        }
    }
    let excluded = m - terms.len();
    if terms.is_empty() {
        return Ok((f64::NEG_INFINITY, excluded));
    }
    Ok((crate::quadrature::pairwise_sum(&terms) / terms.len() as f64, excluded))
}

/// Numerical test for `log(1 - |b|^2)` being integrable on the circle: the
/// trimmed mean must be finite and agree on `M` and `2M` samples to within
/// `1e-2 (1 + |mean|)`.
pub fn is_nonextreme(b: &ComplexPoly, m: usize) -> Result<NonExtremeReport> {
    trace::record("is_nonextreme");
    let (coarse, excluded) = trimmed_log_mean(b, m)?;
    let (fine, _) = trimmed_log_mean(b, 2 * m)?;
    let stable = coarse.is_finite() && fine.is_finite() && (coarse - fine).abs() <= 1e-2 * (1.0 + coarse.abs());
    Ok(NonExtremeReport {
        nonextreme: stable,
        log_integral: coarse,
        excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerFactorCheck {
    Pass,
    Fail,
    Indeterminate,
}

/// Checks that `b(0) = 0` and that `b(z)/z` has no zeros on `grid`.
pub fn inner_factor_is_z_check(pair: &PairBA, grid: &[C64]) -> InnerFactorCheck {
    trace::record("inner_factor_is_z_check");
    let scale = pair.b.h2_norm().max(f64::MIN_POSITIVE);
    if pair.b.coeff(0).norm() > 1e-10 * scale.max(1.0) {
        return InnerFactorCheck::Fail;
    }
    let reduced = pair.b.shift_down(1);
    if reduced.h2_norm() <= 1e-12 {
        return InnerFactorCheck::Indeterminate;
    }
    if reduced.coeff(0).norm() <= 1e-10 {
        return InnerFactorCheck::Fail;
    }
    let min = grid.iter().map(|z| reduced.eval(*z).norm()).fold(f64::INFINITY, f64::min);
    if min > 1e-8 {
        InnerFactorCheck::Pass
    } else {
        InnerFactorCheck::Indeterminate
    }
}
