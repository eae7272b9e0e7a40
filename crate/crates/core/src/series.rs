//! Truncated Taylor polynomials, rational functions, boundary sampling and
//! the Hardy-space inner product.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::trace;
use crate::{Error, Result, C64};

/// Denominator roots with modulus at or below this are treated as lying in
/// the closed disk.
pub const POLE_MARGIN: f64 = 1e-9;

/// Default Taylor truncation degree.
pub const DEFAULT_TRUNCATION: usize = 128;

/// Default number of boundary samples.
pub const DEFAULT_BOUNDARY_GRID: usize = 4096;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Polynomial `c_0 + c_1 z + ... + c_N z^N` given by its Taylor coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl ComplexPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![zero()] }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: C64) -> Self {
        let mut coeffs = vec![zero(); n + 1];
        coeffs[n] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Nominal degree: the index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last coefficient whose modulus exceeds `tol`.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_else(zero)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(zero(), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by Horner's scheme.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = zero();
        let mut dp = zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &c)| c * n as f64)
                .collect(),
        )
    }

    pub fn h2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn h2_norm(&self) -> f64 {
        self.h2_norm_sq().sqrt()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Keeps coefficients `0..=n`, padding with zeros if needed.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new((0..=n).map(|k| self.coeff(k)).collect())
    }

    /// Coefficients of `(f(z) - f(0) - ... ) / z^k`, i.e. the backward shift
    /// applied `k` times.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    /// `z^k f(z)`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Coefficients of `f(rz)` for an arbitrary real factor.
    fn scaled_argument(&self, r: f64) -> Self {
        let mut p = 1.0;
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let out = c * p;
                    p *= r;
                    out
                })
                .collect(),
        )
    }

    /// Synthetic division by `(z - zeta)`: returns the quotient and the
    /// remainder, which equals `f(zeta)`.
    pub fn deflate(&self, zeta: C64) -> (Self, C64) {
        let n = self.degree();
        if n == 0 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut q = vec![zero(); n];
        let mut carry = self.coeffs[n];
        for k in (0..n).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + carry * zeta;
        }
        (Self::new(q), carry)
    }

    /// Order of the zero at the origin, ignoring coefficients below `tol`.
    /// `None` when every coefficient is below `tol`.
    pub fn zero_order_at_origin(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > tol)
    }
}

impl From<&ComplexPoly> for RationalFn {
    fn from(p: &ComplexPoly) -> Self {
        RationalFn::from_parts_unchecked(p.clone(), ComplexPoly::constant(C64::new(1.0, 0.0)))
    }
}

impl fmt::Display for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Roots of a polynomial from the eigenvalues of its companion matrix.
/// Trailing (highest-order) zero coefficients are dropped first.
pub fn poly_roots(p: &ComplexPoly) -> Vec<C64> {
    let Some(deg) = p.effective_degree(0.0) else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let c = p.coeffs();
    let lead = c[deg];
    let mut m = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    match m.clone().schur().eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        // Complex Schur forms are triangular, so this is not expected; fall
        // back to the diagonal of the Schur factor.
        None => {
            let (_, t) = m.schur().unpack();
            (0..deg).map(|i| t[(i, i)]).collect()
        }
    }
}

/// Rational function `num / den`.
///
/// Functions built with [`RationalFn::new`] are holomorphic on a neighbourhood
/// of the closed disk. [`RationalFn::symbol`] relaxes this to allow poles on
/// the unit circle, which is what Smirnov-class symbols such as
/// `z / (1 - conj(zeta) z)` with `|zeta| = 1` need.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalFn {
    num: ComplexPoly,
    den: ComplexPoly,
    #[serde(skip)]
    min_pole_modulus: f64,
}

/// Unvalidated JSON form `{"num": [[re,im],...], "den": [[re,im],...]}`.
#[derive(Clone, Debug, Deserialize)]
pub struct RationalSpec {
    pub num: Vec<C64>,
    #[serde(default = "unit_den")]
    pub den: Vec<C64>,
}

fn unit_den() -> Vec<C64> {
    vec![C64::new(1.0, 0.0)]
}

impl RationalSpec {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn into_strict(self) -> Result<RationalFn> {
        RationalFn::new(ComplexPoly::new(self.num), ComplexPoly::new(self.den))
    }

    pub fn into_symbol(self) -> Result<RationalFn> {
        RationalFn::symbol(ComplexPoly::new(self.num), ComplexPoly::new(self.den))
    }
}

impl RationalFn {
    /// Validated constructor: `den(0) != 0` and every denominator root has
    /// modulus greater than `1 + POLE_MARGIN`.
    pub fn new(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        let r = Self::checked(num, den)?;
        if r.min_pole_modulus <= 1.0 + POLE_MARGIN {
            return Err(r.pole_error("closed unit disk"));
        }
        Ok(r)
    }

    /// Constructor for symbols: poles on the unit circle are allowed, poles in
    /// the open disk are not.
    pub fn symbol(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        let r = Self::checked(num, den)?;
        if r.min_pole_modulus < 1.0 - POLE_MARGIN {
            return Err(r.pole_error("open unit disk"));
        }
        Ok(r)
    }

    pub fn polynomial(p: ComplexPoly) -> Self {
        Self::from(&p)
    }

    fn checked(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.coeff(0).norm() == 0.0 {
            return Err(Error::DenominatorZeroAtOrigin);
        }
        Ok(Self::from_parts_unchecked(num, den))
    }

    pub(crate) fn from_parts_unchecked(num: ComplexPoly, den: ComplexPoly) -> Self {
        let min_pole_modulus = poly_roots(&den)
            .iter()
            .map(|r| r.norm())
            .fold(f64::INFINITY, f64::min);
        Self {
            num,
            den,
            min_pole_modulus,
        }
    }

    pub(crate) fn pole_error(&self, region: &'static str) -> Error {
        let root = poly_roots(&self.den)
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or_else(zero);
        Error::PoleInDisk {
            root,
            modulus: root.norm(),
            region,
        }
    }

    pub fn num(&self) -> &ComplexPoly {
        &self.num
    }

    pub fn den(&self) -> &ComplexPoly {
        &self.den
    }

    /// Smallest modulus of a denominator root (infinite for polynomials).
    pub fn min_pole_modulus(&self) -> f64 {
        self.min_pole_modulus
    }

    /// True when the function is holomorphic on a neighbourhood of the
    /// closed disk.
    pub fn is_regular_on_closed_disk(&self) -> bool {
        self.min_pole_modulus > 1.0 + POLE_MARGIN
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn derivative_at(&self, z: C64) -> C64 {
        let (p, dp) = self.num.eval_with_derivative(z);
        let (q, dq) = self.den.eval_with_derivative(z);
        (dp * q - p * dq) / (q * q)
    }

    /// `f(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        check_dilation(r)?;
        Ok(Self::from_parts_unchecked(
            self.num.scaled_argument(r),
            self.den.scaled_argument(r),
        ))
    }

    /// The quotient `phi(rz) / phi(z)` with the common zero at the origin
    /// cancelled. Requires `phi` not identically zero and `0 < r <= 1`.
    pub fn dilation_quotient(&self, r: f64) -> Result<Self> {
        check_dilation(r)?;
        if r == 0.0 {
            return Err(Error::DilationRange(r));
        }
        let order = self
            .num
            .zero_order_at_origin(0.0)
            .ok_or_else(|| Error::InvalidParameter("symbol is identically zero".into()))?;
        let reduced = self.num.shift_down(order);
        let num = reduced
            .scaled_argument(r)
            .mul(&self.den)
            .scale(C64::new(r.powi(order as i32), 0.0));
        let den = self.den.scaled_argument(r).mul(&reduced);
        Self::checked(num, den)
    }

    /// `(f(lambda) - f(zeta)) / (lambda - zeta)` with the removable
    /// singularity divided out exactly.
    pub fn difference_quotient(&self, zeta: C64) -> Self {
        let dz = self.den.eval(zeta);
        let fz = self.num.eval(zeta) / dz;
        // num(l) - f(zeta) den(l) vanishes at zeta; deflate it.
        let numerator = self.num.sub(&self.den.scale(fz));
        let (q, _) = numerator.deflate(zeta);
        Self {
            num: q,
            den: self.den.clone(),
            min_pole_modulus: self.min_pole_modulus,
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// Holomorphic carriers accepted by the Dirichlet-integral routines.
pub trait Holomorphic {
    fn eval(&self, z: C64) -> C64;
    fn derivative_at(&self, z: C64) -> C64;
    /// `(f(lambda) - f(zeta)) / (lambda - zeta)` as a rational function.
    fn difference_quotient(&self, zeta: C64) -> RationalFn;
    fn h2_norm_sq(&self) -> f64;
    fn dilate(&self, r: f64) -> Result<Self>
    where
        Self: Sized;
}

impl Holomorphic for ComplexPoly {
    fn eval(&self, z: C64) -> C64 {
        ComplexPoly::eval(self, z)
    }

    fn derivative_at(&self, z: C64) -> C64 {
        let n = self.coeffs.len();
        let mut acc = zero();
        for k in (1..n).rev() {
            acc = acc * z + self.coeffs[k] * k as f64;
        }
        acc
    }

    fn difference_quotient(&self, zeta: C64) -> RationalFn {
        RationalFn::polynomial(self.deflate(zeta).0)
    }

    fn h2_norm_sq(&self) -> f64 {
        ComplexPoly::h2_norm_sq(self)
    }

    fn dilate(&self, r: f64) -> Result<Self> {
        dilate(self, r)
    }
}

impl Holomorphic for RationalFn {
    fn eval(&self, z: C64) -> C64 {
        RationalFn::eval(self, z)
    }

    fn derivative_at(&self, z: C64) -> C64 {
        RationalFn::derivative_at(self, z)
    }

    fn difference_quotient(&self, zeta: C64) -> RationalFn {
        RationalFn::difference_quotient(self, zeta)
    }

    /// Circle mean of `|f|^2`, doubling the grid until it settles.
    fn h2_norm_sq(&self) -> f64 {
        if self.den.effective_degree(0.0) == Some(0) {
            return self.num.h2_norm_sq() / self.den.coeff(0).norm_sqr();
        }
        let mut m = 1024;
        let mut prev = circle_mean_abs_sq(self, m);
        while m < 1 << 20 {
            m *= 2;
            let next = circle_mean_abs_sq(self, m);
            if (next - prev).abs() <= 1e-15 * next.abs() {
                return next;
            }
            prev = next;
        }
        prev
    }

    fn dilate(&self, r: f64) -> Result<Self> {
        RationalFn::dilate(self, r)
    }
}

fn circle_mean_abs_sq(f: &RationalFn, m: usize) -> f64 {
    let vals: Vec<f64> = (0..m).map(|j| f.eval(root_of_unity(j, m)).norm_sqr()).collect();
    crate::quadrature::pairwise_sum(&vals) / m as f64
}

/// `e^{2 pi i j / m}`.
pub fn root_of_unity(j: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)
}

fn check_dilation(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::DilationRange(r));
    }
    Ok(())
}

/// Truncated Cauchy kernel `k_w(z) = 1/(1 - conj(w) z)`: coefficients
/// `conj(w)^n`, `0 <= n <= n_max`.
pub fn cauchy_kernel(w: C64, n_max: usize) -> Result<ComplexPoly> {
    trace::record("cauchy_kernel");
    if w.norm() >= 1.0 {
        return Err(Error::OutsideDisk(w));
    }
    let cw = w.conj();
    let mut p = C64::new(1.0, 0.0);
    let coeffs = (0..=n_max)
        .map(|_| {
            let out = p;
            p *= cw;
            out
        })
        .collect();
    Ok(ComplexPoly::new(coeffs))
}

/// `sum_n f_n conj(g_n)`.
pub fn h2_inner(f: &ComplexPoly, g: &ComplexPoly) -> C64 {
    trace::record("h2_inner");
    f.coeffs
        .iter()
        .zip(g.coeffs.iter())
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// The dilate `f_r(z) = f(rz)` for `0 <= r <= 1`.
pub fn dilate(f: &ComplexPoly, r: f64) -> Result<ComplexPoly> {
    trace::record("dilate");
    check_dilation(r)?;
    Ok(f.scaled_argument(r))
}

/// Taylor coefficients of `num/den` at the origin through degree `n_max`,
/// by power-series long division.
pub fn rational_to_poly(rf: &RationalFn, n_max: usize) -> Result<ComplexPoly> {
    trace::record("rational_to_poly");
    if !rf.is_regular_on_closed_disk() {
        return Err(rf.pole_error("closed unit disk"));
    }
    Ok(series_division(&rf.num, &rf.den, n_max))
}

/// Long division without the pole check; coefficients may grow when the
/// denominator has zeros on or inside the circle.
pub(crate) fn series_division(num: &ComplexPoly, den: &ComplexPoly, n_max: usize) -> ComplexPoly {
    let d0 = den.coeff(0);
    let dd = den.degree();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = num.coeff(n);
        for k in 1..=dd.min(n) {
            acc -= den.coeff(k) * out[n - k];
        }
        out.push(acc / d0);
    }
    ComplexPoly::new(out)
}

/// Values on the uniform grid `lambda_j = e^{2 pi i j / M}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySamples {
    values: Vec<C64>,
}

impl BoundarySamples {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        check_pow2(values.len())?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, j: usize) -> C64 {
        root_of_unity(j, self.values.len())
    }

    /// Every `step`-th sample, i.e. the restriction to the `M/step` grid.
    pub fn subsample(&self, m: usize) -> Result<Self> {
        check_pow2(m)?;
        if m > self.values.len() {
            return Err(Error::Truncation {
                requested: m,
                available: self.values.len(),
            });
        }
        let step = self.values.len() / m;
        Ok(Self {
            values: self.values.iter().step_by(step).copied().collect(),
        })
    }
}

pub(crate) fn check_pow2(m: usize) -> Result<()> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    Ok(())
}

/// Samples a function at the `m` roots of unity.
pub fn boundary_samples<F: Fn(C64) -> C64>(f: F, m: usize) -> Result<BoundarySamples> {
    trace::record("boundary_samples");
    check_pow2(m)?;
    Ok(BoundarySamples {
        values: (0..m).map(|j| f(root_of_unity(j, m))).collect(),
    })
}

/// Recovers Taylor coefficients `0..=n_max` from boundary samples by the
/// discrete Fourier transform. Exact when the samples come from a polynomial
/// of degree below `M`.
pub fn samples_to_coeffs(s: &BoundarySamples, n_max: usize) -> Result<ComplexPoly> {
    trace::record("samples_to_coeffs");
    let m = s.len();
    if n_max >= m {
        return Err(Error::Truncation {
            requested: n_max,
            available: m - 1,
        });
    }
    let spectrum = fourier_coefficients(&s.values);
    Ok(ComplexPoly::new(spectrum[..=n_max].to_vec()))
}

/// `c_k = (1/M) sum_j v_j e^{-2 pi i jk/M}` for `k = 0..M`; index `k >= M/2`
/// holds the negative frequency `k - M`.
pub(crate) fn fourier_coefficients(values: &[C64]) -> Vec<C64> {
    let m = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let inv = 1.0 / m as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// `v_j = sum_k c_k e^{2 pi i jk/M}`.
pub(crate) fn synthesize(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Maximum of `|R|` on the unit circle: the largest of `M` uniform samples,
/// refined by a golden-section search around the leading local maxima.
pub fn sup_on_circle(rf: &RationalFn, m: usize) -> Result<f64> {
    trace::record("sup_on_circle");
    check_pow2(m)?;
    let den_scale = rf.den.coeffs.iter().map(|c| c.norm()).sum::<f64>();
    let mut vals = Vec::with_capacity(m);
    for j in 0..m {
        let z = root_of_unity(j, m);
        let d = rf.den.eval(z);
        if d.norm() <= 1e-13 * den_scale {
            return Err(Error::PoleOnGrid(z));
        }
        vals.push((rf.num.eval(z) / d).norm());
    }
    let grid_max = vals.iter().copied().fold(0.0, f64::max);
    let step = 2.0 * PI / m as f64;
    let modulus = |t: f64| rf.eval(C64::from_polar(1.0, t)).norm();
    let mut best = grid_max;
    for j in 0..m {
        let (prev, next) = (vals[(j + m - 1) % m], vals[(j + 1) % m]);
        let v = vals[j];
        if v >= prev && v >= next && v >= grid_max - 1e-6 * (1.0 + grid_max) {
            let t = golden_max(&modulus, (j as f64 - 1.0) * step, (j as f64 + 1.0) * step);
            best = best.max(modulus(t));
        }
    }
    Ok(best)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cauchy_kernel_at_origin_is_one() {
        let k = cauchy_kernel(c(0.0, 0.0), 7).unwrap();
        assert_eq!(k.coeff(0), c(1.0, 0.0));
        assert!(k.coeffs()[1..].iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn cauchy_kernel_norm_and_inner_product() {
        let kw = cauchy_kernel(c(0.5, 0.0), 60).unwrap();
        assert_abs_diff_eq!(kw.h2_norm_sq(), 4.0 / 3.0, epsilon = 1e-8);
        let kv = cauchy_kernel(c(1.0 / 3.0, 0.0), 60).unwrap();
        let ip = h2_inner(&kw, &kv);
        assert_abs_diff_eq!(ip.re, 1.2, epsilon = 1e-8);
        assert_abs_diff_eq!(ip.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cauchy_kernel_rejects_boundary() {
        assert!(matches!(
            cauchy_kernel(c(0.6, 0.8), 4),
            Err(Error::OutsideDisk(_))
        ));
    }

    #[test]
    fn h2_inner_small_cases() {
        let one = ComplexPoly::constant(c(1.0, 0.0));
        assert_eq!(h2_inner(&one, &one), c(1.0, 0.0));
        let z2 = ComplexPoly::monomial(2, c(1.0, 0.0));
        let z3 = ComplexPoly::monomial(3, c(1.0, 0.0));
        assert_eq!(h2_inner(&z2, &z3), c(0.0, 0.0));
        let f = ComplexPoly::from_real(&[0.0, 3.0, 1.0]);
        assert_eq!(h2_inner(&f, &f), c(10.0, 0.0));
    }

    #[test]
    fn dilate_cases() {
        let f = ComplexPoly::from_real(&[2.0, -1.0, 4.0]);
        assert_eq!(dilate(&f, 1.0).unwrap(), f);
        let f0 = dilate(&f, 0.0).unwrap();
        assert_eq!(f0.coeff(0), c(2.0, 0.0));
        assert_eq!(f0.coeff(1), c(0.0, 0.0));
        let z2 = ComplexPoly::monomial(2, c(1.0, 0.0));
        assert_eq!(dilate(&z2, 0.5).unwrap().coeff(2), c(0.25, 0.0));
        assert!(matches!(dilate(&f, 1.5), Err(Error::DilationRange(_))));
        assert!(matches!(dilate(&f, -0.1), Err(Error::DilationRange(_))));
    }

    #[test]
    fn long_division_cases() {
        let r = RationalFn::new(
            ComplexPoly::from_real(&[1.0]),
            ComplexPoly::from_real(&[1.0, -0.5]),
        )
        .unwrap();
        let p = rational_to_poly(&r, 3).unwrap();
        for (k, want) in [1.0, 0.5, 0.25, 0.125].iter().enumerate() {
            assert_abs_diff_eq!(p.coeff(k).re, *want, epsilon = 1e-15);
        }
        // z / (1 - conj(i) z) with a pole inside the closed disk is rejected by
        // the strict constructor but its series is still [0, 1, -i, ...].
        let den = ComplexPoly::new(vec![c(1.0, 0.0), -c(0.0, 1.0).conj()]);
        let num = ComplexPoly::from_real(&[0.0, 1.0]);
        assert!(RationalFn::new(num.clone(), den.clone()).is_err());
        let s = series_division(&num, &den, 2);
        assert_eq!(s.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]);
        let five = RationalFn::polynomial(ComplexPoly::from_real(&[5.0]));
        let p = rational_to_poly(&five, 2).unwrap();
        assert_eq!(p.coeffs(), &[c(5.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn strict_constructor_rejects_poles() {
        let num = ComplexPoly::from_real(&[1.0]);
        assert!(matches!(
            RationalFn::new(num.clone(), ComplexPoly::from_real(&[0.0, 1.0])),
            Err(Error::DenominatorZeroAtOrigin)
        ));
        assert!(matches!(
            RationalFn::new(num.clone(), ComplexPoly::from_real(&[1.0, -2.0])),
            Err(Error::PoleInDisk { .. })
        ));
        // Pole on the circle: rejected strictly, accepted as a symbol.
        let den = ComplexPoly::from_real(&[1.0, -1.0]);
        assert!(RationalFn::new(num.clone(), den.clone()).is_err());
        assert!(RationalFn::symbol(num.clone(), den).is_ok());
        assert!(RationalFn::symbol(num, ComplexPoly::from_real(&[1.0, -1.25])).is_err());
    }

    #[test]
    fn companion_roots() {
        // (z - 2)(z + 3i) = z^2 + (3i - 2) z - 6i
        let p = ComplexPoly::new(vec![c(0.0, -6.0), c(-2.0, 3.0), c(1.0, 0.0)]);
        let mut roots = poly_roots(&p);
        roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        assert_abs_diff_eq!((roots[0] - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((roots[1] - c(0.0, -3.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn boundary_round_trips() {
        let z = ComplexPoly::monomial(1, c(1.0, 0.0));
        let s = boundary_samples(|x| z.eval(x), 8).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            assert_abs_diff_eq!((v - root_of_unity(j, 8)).norm(), 0.0, epsilon = 1e-15);
        }
        let back = samples_to_coeffs(&s, 1).unwrap();
        assert_abs_diff_eq!((back.coeff(0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((back.coeff(1) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let k = cauchy_kernel(c(0.5, 0.0), 40).unwrap();
        let s = boundary_samples(|x| k.eval(x), 256).unwrap();
        let back = samples_to_coeffs(&s, 40).unwrap();
        for n in 0..=40 {
            assert_abs_diff_eq!((back.coeff(n) - c(0.5f64.powi(n as i32), 0.0)).norm(), 0.0, epsilon = 1e-12);
        }

        let s = boundary_samples(|_| c(3.0, 0.0), 16).unwrap();
        assert!(s.values().iter().all(|&v| v == c(3.0, 0.0)));
        assert!(matches!(boundary_samples(|x| x, 12), Err(Error::NotPowerOfTwo(12))));
    }

    fn phi_family(zeta: C64) -> RationalFn {
        RationalFn::symbol(
            ComplexPoly::from_real(&[0.0, 1.0]),
            ComplexPoly::new(vec![c(1.0, 0.0), -zeta.conj()]),
        )
        .unwrap()
    }

    #[test]
    fn sup_of_identity_and_phi_quotients() {
        let z = RationalFn::polynomial(ComplexPoly::monomial(1, c(1.0, 0.0)));
        assert_abs_diff_eq!(sup_on_circle(&z, 64).unwrap(), 1.0, epsilon = 1e-15);

        let q = phi_family(c(1.0, 0.0)).dilation_quotient(0.5).unwrap();
        assert_abs_diff_eq!(sup_on_circle(&q, 4096).unwrap(), 2.0 / 3.0, epsilon = 1e-10);

        let q = phi_family(c(0.0, 0.0)).dilation_quotient(0.3).unwrap();
        assert_abs_diff_eq!(sup_on_circle(&q, 4096).unwrap(), 0.3, epsilon = 1e-14);
    }

    #[test]
    fn sup_refines_off_grid_maxima() {
        // Maximum direction -zeta is not a grid node for this zeta.
        let zeta = C64::from_polar(1.0, PI / 3.0);
        let r = 0.7;
        let q = phi_family(zeta).dilation_quotient(r).unwrap();
        let want = r * 2.0 / (1.0 + r);
        assert_abs_diff_eq!(sup_on_circle(&q, 4096).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(sup_on_circle(&q, 16).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn sup_reports_pole_on_grid() {
        let r = RationalFn::symbol(
            ComplexPoly::from_real(&[1.0]),
            ComplexPoly::from_real(&[1.0, -1.0]),
        )
        .unwrap();
        assert!(matches!(sup_on_circle(&r, 64), Err(Error::PoleOnGrid(_))));
    }

    #[test]
    fn deflation_matches_division() {
        let f = ComplexPoly::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)]);
        let zeta = c(0.3, -0.7);
        let (q, rem) = f.deflate(zeta);
        assert_abs_diff_eq!((rem - f.eval(zeta)).norm(), 0.0, epsilon = 1e-14);
        let lam = c(0.9, 0.1);
        let direct = (f.eval(lam) - f.eval(zeta)) / (lam - zeta);
        assert_abs_diff_eq!((q.eval(lam) - direct).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn rational_difference_quotient() {
        let k = RationalFn::new(
            ComplexPoly::from_real(&[1.0]),
            ComplexPoly::new(vec![c(1.0, 0.0), -c(0.4, 0.3).conj()]),
        )
        .unwrap();
        let zeta = c(0.0, 1.0);
        let dq = k.difference_quotient(zeta);
        let lam = c(0.6, -0.8);
        let direct = (k.eval(lam) - k.eval(zeta)) / (lam - zeta);
        assert_abs_diff_eq!((dq.eval(lam) - direct).norm(), 0.0, epsilon = 1e-13);
    }
}
