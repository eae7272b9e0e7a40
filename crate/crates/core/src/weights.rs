//! Superharmonic weights given by their representing measures, power weights
//! and sampled weights, together with the Bergman projection, the Berezin
//! transform and the residual scanners built on them.
//!
//! A unit atom at `zeta` contributes the weight
//!
//! * `log|(1 - conj(zeta) z)/(zeta - z)| * 2/(1 - |zeta|^2)` for `|zeta| < 1`
//!   (a scaled Green function), and
//! * `(1 - |z|^2)/|zeta - z|^2` for `|zeta| = 1` (the Poisson kernel).
//!
//! For atomic and power weights the mixed moments
//! `M(n, m) = int w(v) conj(v)^n v^m dA(v)` are obtained by integrating the
//! angular Fourier modes of the weight, which are known in closed form, with
//! a one-dimensional Gauss rule in the radius. This avoids placing a
//! two-dimensional rule over the singularities of the weight.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate_disk, DiskRule, UnitGauss};
use crate::trace;
use crate::{Error, Result, C64};

/// Points within this distance of the unit circle are treated as boundary
/// atoms.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default truncation for the moment series of the Bergman projection and
/// the Berezin transform.
pub const DEFAULT_MOMENT_ORDER: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: C64,
    pub mass: f64,
}

impl Atom {
    pub fn new(point: C64, mass: f64) -> Self {
        Self { point, mass }
    }

    pub fn is_boundary(&self) -> bool {
        (self.point.norm() - 1.0).abs() <= BOUNDARY_TOL
    }
}

fn check_point(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1.0 + BOUNDARY_TOL {
        return Err(Error::OutsideClosedDisk(z));
    }
    Ok(())
}

/// Positive finite measure on the closed disk with finitely many atoms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            check_point(a.point)?;
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "atom mass {} is not a positive finite number",
                    a.mass
                )));
            }
        }
        Ok(Self { atoms })
    }

    /// `mass * delta_zeta`.
    pub fn dirac(zeta: C64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom::new(zeta, mass)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom::new(a.point, a.mass * c))
                .collect(),
        )
    }

    pub fn to_signed(&self) -> SignedAtomicMeasure {
        SignedAtomicMeasure {
            atoms: self.atoms.clone(),
        }
    }
}

impl<'de> Deserialize<'de> for AtomicMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            atoms: Vec<Atom>,
        }
        let raw = Raw::deserialize(d)?;
        AtomicMeasure::new(raw.atoms).map_err(serde::de::Error::custom)
    }
}

/// Finite signed measure with finitely many atoms; only used by the moment
/// relation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedAtomicMeasure {
    atoms: Vec<Atom>,
}

impl SignedAtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            check_point(a.point)?;
            if a.mass == 0.0 || !a.mass.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "signed atom mass {} must be finite and nonzero",
                    a.mass
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Merges atoms closer than `tol` and drops atoms whose merged mass
    /// cancels.
    pub fn merged(&self, tol: f64) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        for a in &self.atoms {
            match out.iter_mut().find(|b| (b.point - a.point).norm() <= tol) {
                Some(b) => b.mass += a.mass,
                None => out.push(*a),
            }
        }
        out.retain(|a| a.mass != 0.0);
        out
    }
}

impl<'de> Deserialize<'de> for SignedAtomicMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            atoms: Vec<Atom>,
        }
        let raw = Raw::deserialize(d)?;
        SignedAtomicMeasure::new(raw.atoms).map_err(serde::de::Error::custom)
    }
}

/// Weight sampled on a polar grid and interpolated bilinearly (periodic in
/// the angle, constant extrapolation in the radius).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    /// `values[i][k]` at radius `radii[i]` and angle `2 pi k / n_theta`.
    pub values: Vec<Vec<f64>>,
}

impl PolarGrid {
    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.n_theta == 0 {
            return Err(Error::InvalidParameter("empty sampled weight grid".into()));
        }
        if self.values.len() != self.radii.len()
            || self.values.iter().any(|row| row.len() != self.n_theta)
        {
            return Err(Error::InvalidParameter(
                "sampled weight values do not match the grid shape".into(),
            ));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0])
            || self.radii.iter().any(|&r| !(0.0..1.0).contains(&r))
        {
            return Err(Error::InvalidParameter(
                "sampled weight radii must increase within [0, 1)".into(),
            ));
        }
        if self.values.iter().flatten().any(|&v| v < 0.0 || v.is_nan()) {
            return Err(Error::InvalidParameter(
                "sampled weight values must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn eval(&self, z: C64) -> f64 {
        let r = z.norm();
        let t = z.arg().rem_euclid(2.0 * PI) / (2.0 * PI) * self.n_theta as f64;
        let k0 = (t.floor() as usize) % self.n_theta;
        let k1 = (k0 + 1) % self.n_theta;
        let ft = t - t.floor();
        let row = |i: usize| self.values[i][k0] * (1.0 - ft) + self.values[i][k1] * ft;
        let i = self.radii.partition_point(|&x| x <= r);
        if i == 0 {
            return row(0);
        }
        if i == self.radii.len() {
            return row(i - 1);
        }
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let fr = (r - r0) / (r1 - r0);
        row(i - 1) * (1.0 - fr) + row(i) * fr
    }
}

type WeightFn = dyn Fn(C64) -> f64 + Send + Sync;

/// User-supplied pointwise weight.
#[derive(Clone)]
pub struct SampledWeight {
    eval: Arc<WeightFn>,
    grid: Option<PolarGrid>,
}

impl SampledWeight {
    pub fn from_fn<F: Fn(C64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self {
            eval: Arc::new(f),
            grid: None,
        }
    }

    pub fn from_grid(grid: PolarGrid) -> Result<Self> {
        grid.validate()?;
        let g = grid.clone();
        Ok(Self {
            eval: Arc::new(move |z| g.eval(z)),
            grid: Some(grid),
        })
    }

    pub fn eval(&self, z: C64) -> f64 {
        (self.eval)(z)
    }

    pub fn grid(&self) -> Option<&PolarGrid> {
        self.grid.as_ref()
    }
}

impl fmt::Debug for SampledWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledWeight")
            .field("grid", &self.grid.as_ref().map(|g| (g.radii.len(), g.n_theta)))
            .finish()
    }
}

/// A Dirichlet weight on the disk.
#[derive(Clone, Debug)]
pub enum Weight {
    /// Superharmonic weight with the given representing measure.
    Superharmonic(AtomicMeasure),
    /// `(1 - |z|^2)^alpha`, `0 <= alpha <= 1`.
    Power(f64),
    Sampled(SampledWeight),
}

/// JSON form of a weight, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    Atomic { atoms: Vec<Atom> },
    Power { alpha: f64 },
    Sampled(PolarGrid),
}

impl WeightSpec {
    pub fn parse(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn into_weight(self) -> Result<Weight> {
        match self {
            WeightSpec::Atomic { atoms } => Ok(Weight::Superharmonic(AtomicMeasure::new(atoms)?)),
            WeightSpec::Power { alpha } => Weight::power(alpha),
            WeightSpec::Sampled(grid) => Ok(Weight::Sampled(SampledWeight::from_grid(grid)?)),
        }
    }
}

impl Weight {
    /// The weight `omega_zeta` of a unit atom.
    pub fn unit_atom(zeta: C64) -> Result<Self> {
        Ok(Weight::Superharmonic(AtomicMeasure::dirac(zeta, 1.0)?))
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "power weight exponent {alpha} outside [0, 1]"
            )));
        }
        Ok(Weight::Power(alpha))
    }

    pub fn to_spec(&self) -> Option<WeightSpec> {
        match self {
            Weight::Superharmonic(mu) => Some(WeightSpec::Atomic {
                atoms: mu.atoms.clone(),
            }),
            Weight::Power(alpha) => Some(WeightSpec::Power { alpha: *alpha }),
            Weight::Sampled(s) => s.grid.clone().map(WeightSpec::Sampled),
        }
    }

    /// Direction of the first boundary atom, if any.
    pub(crate) fn boundary_direction(&self) -> Option<f64> {
        match self {
            Weight::Superharmonic(mu) => mu.atoms.iter().find(|a| a.is_boundary()).map(|a| a.point.arg()),
            _ => None,
        }
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> f64 {
        match self {
            Weight::Superharmonic(mu) => mu.atoms.iter().map(|a| a.mass * atom_weight(a.point, z)).sum(),
            Weight::Power(alpha) => (1.0 - z.norm_sqr()).powf(*alpha),
            Weight::Sampled(s) => s.eval(z),
        }
    }
}

/// Weight of a unit atom at `zeta`, evaluated at `z` in the open disk.
fn atom_weight(zeta: C64, z: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    if (zeta.norm() - 1.0).abs() <= BOUNDARY_TOL {
        (1.0 - z.norm_sqr()) / (zeta - z).norm_sqr()
    } else {
        let d = (zeta - z).norm_sqr();
        if d == 0.0 {
            return f64::INFINITY;
        }
        let ratio_sq = (one - zeta.conj() * z).norm_sqr() / d;
        ratio_sq.ln() / (1.0 - zeta.norm_sqr())
    }
}

/// `omega(z)` for `|z| < 1`; `+inf` at an interior atom.
pub fn eval_weight(w: &Weight, z: C64) -> Result<f64> {
    trace::record("eval_weight");
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk(z));
    }
    Ok(w.eval_unchecked(z))
}

/// Mixed moments `M(n, m) = int w(v) conj(v)^n v^m dA(v)` for `n, m <= order`.
#[derive(Clone, Debug)]
pub struct MomentTable {
    order: usize,
    /// `diag[k][m] = M(m + k, m)`.
    diag: Vec<Vec<C64>>,
}

impl MomentTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        if n >= m {
            self.diag[n - m][m]
        } else {
            self.diag[m - n][n].conj()
        }
    }

    /// Moments for an atomic or power weight. `None` for sampled weights.
    pub fn compute(w: &Weight, rule: &DiskRule, order: usize) -> Option<Self> {
        let mut diag: Vec<Vec<C64>> = (0..=order).map(|k| vec![C64::new(0.0, 0.0); order + 1 - k]).collect();
        match w {
            Weight::Superharmonic(mu) => {
                for atom in mu.atoms() {
                    accumulate_atom(&mut diag, atom, rule.gauss(), order);
                }
            }
            Weight::Power(alpha) => {
                // int_0^1 t^m (1-t)^alpha dt = B(m+1, alpha+1).
                let mut p = 1.0 / (alpha + 1.0);
                for (m, entry) in diag[0].iter_mut().enumerate() {
                    if m > 0 {
                        p *= m as f64 / (alpha + m as f64 + 1.0);
                    }
                    *entry += p;
                }
            }
            Weight::Sampled(_) => return None,
        }
        Some(Self { order, diag })
    }
}

/// Adds `mass * int r^{2m} [r^k A_k(r)] 2r dr` to `diag[k][m]`, where `A_k`
/// is the `k`-th angular Fourier coefficient of the atom's weight on the
/// circle of radius `r`:
///
/// * boundary atom: `A_k(r) = r^k conj(zeta)^k`;
/// * interior atom, `c = 2/(1-|zeta|^2)`: `A_0(r) = c log(1/max(r,|zeta|))`
///   and, for `k >= 1`, `A_k(r) = c/(2k) conj(zeta)^k (r^-k - r^k)` when
///   `r > |zeta|`, `c/(2k) r^k (zeta^-k - conj(zeta)^k)` when `r < |zeta|`.
///
/// Interior atoms split the radial interval at `|zeta|` where `A_k` has a
/// kink. The logarithmic `k = 0` row is integrated exactly in `t = r^2`.
fn accumulate_atom(diag: &mut [Vec<C64>], atom: &Atom, gauss: &UnitGauss, order: usize) {
    let zeta = atom.point;
    let a = zeta.norm();
    let cz = zeta.conj();
    let mut modes = vec![C64::new(0.0, 0.0); order + 1];
    let mut r2pow = vec![0.0; order + 1];

    let add_node = |modes: &[C64], r: f64, r2pow: &mut Vec<f64>, diag: &mut [Vec<C64>]| {
        let r2 = r * r;
        let mut p = 1.0;
        for x in r2pow.iter_mut() {
            *x = p;
            p *= r2;
        }
        for (k, row) in diag.iter_mut().enumerate() {
            let t = modes[k];
            for (m, entry) in row.iter_mut().enumerate() {
                *entry += t * r2pow[m];
            }
        }
    };

    if atom.is_boundary() {
        for (r, h) in gauss.on(0.0, 1.0) {
            let base = atom.mass * 2.0 * r * h;
            let step = cz * (r * r);
            let mut p = C64::new(base, 0.0);
            for mode in modes.iter_mut() {
                *mode = p;
                p *= step;
            }
            add_node(&modes, r, &mut r2pow, diag);
        }
        return;
    }

    let c = 2.0 / (1.0 - a * a);
    // Inner piece r < |zeta|: r^k A_k = c/(2k) ((r^2/zeta)^k - (conj(zeta) r^2)^k).
    if a > 0.0 {
        for (r, h) in gauss.on(0.0, a) {
            let base = atom.mass * 2.0 * r * h;
            let r2 = r * r;
            let s1 = r2 / zeta;
            let s2 = cz * r2;
            modes[0] = C64::new(0.0, 0.0);
            let (mut p1, mut p2) = (s1, s2);
            for (k, mode) in modes.iter_mut().enumerate().skip(1) {
                *mode = (p1 - p2) * (base * c / (2.0 * k as f64));
                p1 *= s1;
                p2 *= s2;
            }
            add_node(&modes, r, &mut r2pow, diag);
        }
    }
    // Outer piece r > |zeta|: r^k A_k = c/(2k) (conj(zeta)^k - (conj(zeta) r^2)^k).
    for (r, h) in gauss.on(a, 1.0) {
        let base = atom.mass * 2.0 * r * h;
        let r2 = r * r;
        let s2 = cz * r2;
        modes[0] = C64::new(0.0, 0.0);
        let (mut p1, mut p2) = (cz, s2);
        for (k, mode) in modes.iter_mut().enumerate().skip(1) {
            *mode = (p1 - p2) * (base * c / (2.0 * k as f64));
            p1 *= cz;
            p2 *= s2;
        }
        add_node(&modes, r, &mut r2pow, diag);
    }
    // k = 0: c int t^m log(1/max(sqrt t, |zeta|)) dt over [0, 1].
    let a2 = a * a;
    let log_a2 = if a > 0.0 { a2.ln() } else { 0.0 };
    let mut a2pow = a2;
    for (m, entry) in diag[0].iter_mut().enumerate() {
        let m1 = (m + 1) as f64;
        let inner = -0.5 * log_a2 * a2pow / m1;
        let outer = 0.5 / (m1 * m1) + 0.5 * a2pow * (log_a2 / m1 - 1.0 / (m1 * m1));
        *entry += atom.mass * c * (inner + outer);
        a2pow *= a2;
    }
}

/// Bergman projection and Berezin transform of a fixed weight, with the
/// moment table computed once.
#[derive(Clone, Debug)]
pub struct WeightTransforms {
    weight: Weight,
    rule: DiskRule,
    moments: Option<MomentTable>,
}

impl WeightTransforms {
    pub fn new(weight: &Weight, rule: &DiskRule) -> Self {
        Self::with_order(weight, rule, DEFAULT_MOMENT_ORDER)
    }

    pub fn with_order(weight: &Weight, rule: &DiskRule, order: usize) -> Self {
        Self {
            weight: weight.clone(),
            rule: rule.clone(),
            moments: MomentTable::compute(weight, rule, order),
        }
    }

    pub fn moments(&self) -> Option<&MomentTable> {
        self.moments.as_ref()
    }

    pub fn l1_norm(&self) -> Result<f64> {
        match &self.moments {
            Some(t) => Ok(t.get(0, 0).re),
            None => {
                let w = &self.weight;
                let v = integrate_disk(|z| C64::new(w.eval_unchecked(z), 0.0), &self.rule)?;
                Ok(v.re)
            }
        }
    }

    /// `Q w(z) = int w(v) / (1 - conj(v) z)^2 dA(v)`.
    pub fn bergman(&self, z: C64) -> Result<C64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk(z));
        }
        match &self.moments {
            Some(t) => {
                let mut acc = C64::new(0.0, 0.0);
                let mut zp = C64::new(1.0, 0.0);
                for n in 0..=t.order {
                    acc += t.get(n, 0) * zp * (n as f64 + 1.0);
                    zp *= z;
                }
                Ok(acc)
            }
            None => {
                let w = &self.weight;
                let one = C64::new(1.0, 0.0);
                integrate_disk(
                    |v| {
                        let d = one - v.conj() * z;
                        w.eval_unchecked(v) / (d * d)
                    },
                    &self.rule,
                )
            }
        }
    }

    /// `B w(z) = (1 - |z|^2)^2 int w(v) / |1 - conj(v) z|^4 dA(v)`.
    pub fn berezin(&self, z: C64) -> Result<f64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk(z));
        }
        let s = 1.0 - z.norm_sqr();
        match &self.moments {
            Some(t) => {
                let order = t.order;
                let zc = z.conj();
                let mut zpow = Vec::with_capacity(order + 1);
                let mut zcpow = Vec::with_capacity(order + 1);
                let (mut p, mut q) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
                for _ in 0..=order {
                    zpow.push(p);
                    zcpow.push(q);
                    p *= z;
                    q *= zc;
                }
                // Diagonal terms plus twice the real part of the strictly lower
                // triangle, using M(m, n) = conj(M(n, m)).
                let mut diag = 0.0;
                for n in 0..=order {
                    let f = (n as f64 + 1.0).powi(2);
                    diag += f * (t.get(n, n) * zpow[n] * zcpow[n]).re;
                }
                let mut off = 0.0;
                for k in 1..=order {
                    let row = &t.diag[k];
                    for (m, mom) in row.iter().enumerate() {
                        let n = m + k;
                        let f = (n as f64 + 1.0) * (m as f64 + 1.0);
                        off += f * (mom * zpow[n] * zcpow[m]).re;
                    }
                }
                Ok(s * s * (diag + 2.0 * off))
            }
            None => {
                let w = &self.weight;
                let one = C64::new(1.0, 0.0);
                let v = integrate_disk(
                    |v| {
                        let d = (one - v.conj() * z).norm_sqr();
                        C64::new(w.eval_unchecked(v) / (d * d), 0.0)
                    },
                    &self.rule,
                )?;
                Ok(s * s * v.re)
            }
        }
    }

    /// `(1 - |z|^2) |Q w(z)|^2 - B w(z)`.
    pub fn qb_defect(&self, z: C64) -> Result<f64> {
        let q = self.bergman(z)?;
        Ok((1.0 - z.norm_sqr()) * q.norm_sqr() - self.berezin(z)?)
    }
}

/// `||w||_{L^1(D)}` with respect to normalized area measure.
pub fn l1_norm(w: &Weight, rule: &DiskRule) -> Result<f64> {
    trace::record("l1_norm");
    WeightTransforms::with_order(w, rule, 0).l1_norm()
}

/// Bergman projection `Q w(z)`.
pub fn bergman_projection(w: &Weight, z: C64, rule: &DiskRule) -> Result<C64> {
    trace::record("bergman_projection");
    let t = WeightTransforms::with_order(w, rule, moment_order_for(z));
    t.bergman(z)
}

/// Berezin transform `B w(z)`.
pub fn berezin(w: &Weight, z: C64, rule: &DiskRule) -> Result<f64> {
    trace::record("berezin");
    let t = WeightTransforms::with_order(w, rule, moment_order_for(z));
    t.berezin(z)
}

/// Truncation for a single evaluation: enough terms for the geometric tail
/// at `|z|` to drop below 1e-14, capped at the default order.
fn moment_order_for(z: C64) -> usize {
    let r = z.norm();
    if r == 0.0 {
        return 0;
    }
    let n = ((1e-14f64).ln() / r.ln()).ceil() as usize + 16;
    n.clamp(8, DEFAULT_MOMENT_ORDER)
}

/// Default grid for the QB scanner: 15 radii from 0 to 0.9 times 16 angles.
pub fn default_qb_grid() -> Vec<C64> {
    polar_grid(0.9, 15, 16)
}

/// `radii` equally spaced radii in `[0, r_max]` (the first is 0) times
/// `angles` equally spaced angles; the origin appears once.
pub fn polar_grid(r_max: f64, radii: usize, angles: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0)];
    for i in 1..radii {
        let r = r_max * i as f64 / (radii - 1) as f64;
        for k in 0..angles {
            out.push(C64::from_polar(r, 2.0 * PI * k as f64 / angles as f64));
        }
    }
    out
}

/// `max_z |(1 - |z|^2)|Q w(z)|^2 - B w(z)|` over the grid.
pub fn qb_residual(w: &Weight, grid: &[C64], rule: &DiskRule) -> Result<f64> {
    trace::record("qb_residual");
    trace::record("bergman_projection");
    trace::record("berezin");
    let t = WeightTransforms::new(w, rule);
    let mut worst: f64 = 0.0;
    for &z in grid {
        worst = worst.max(t.qb_defect(z)?.abs());
    }
    Ok(worst)
}

/// `max_{n <= n_max, m <= m_max} |mu(D) int z^n conj(z)^m dmu - int z^n dmu int conj(z)^m dmu|`.
pub fn moment_residual(mu: &SignedAtomicMeasure, m_max: usize, n_max: usize) -> f64 {
    trace::record("moment_residual");
    moment_residual_table(mu, m_max, n_max)
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
}

/// Residual of the moment relation for every `(n, m)`; indexed `[n][m]`.
pub fn moment_residual_table(mu: &SignedAtomicMeasure, m_max: usize, n_max: usize) -> Vec<Vec<f64>> {
    let total = mu.total_mass();
    let pow = |z: C64, k: usize| z.powu(k as u32);
    let holo: Vec<C64> = (0..=n_max)
        .map(|n| mu.atoms.iter().map(|a| pow(a.point, n) * a.mass).sum())
        .collect();
    let anti: Vec<C64> = (0..=m_max)
        .map(|m| mu.atoms.iter().map(|a| pow(a.point.conj(), m) * a.mass).sum())
        .collect();
    (0..=n_max)
        .map(|n| {
            (0..=m_max)
                .map(|m| {
                    let mixed: C64 = mu
                        .atoms
                        .iter()
                        .map(|a| pow(a.point, n) * pow(a.point.conj(), m) * a.mass)
                        .sum();
                    (mixed * total - holo[n] * anti[m]).norm()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::make_disk_rule;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rule() -> DiskRule {
        DiskRule::default_rule()
    }

    #[test]
    fn eval_small_cases() {
        let w0 = Weight::unit_atom(c(0.0, 0.0)).unwrap();
        let z = c(0.3, -0.2);
        assert_abs_diff_eq!(eval_weight(&w0, z).unwrap(), 2.0 * (1.0 / z.norm()).ln(), epsilon = 1e-14);
        let w1 = Weight::unit_atom(c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(eval_weight(&w1, c(0.0, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
        let half = Weight::Superharmonic(AtomicMeasure::dirac(c(0.0, 0.0), 0.5).unwrap());
        assert_abs_diff_eq!(eval_weight(&half, z).unwrap(), (1.0 / z.norm()).ln(), epsilon = 1e-14);
        let zeta = c(0.3, 0.4);
        let wz = Weight::unit_atom(zeta).unwrap();
        assert_eq!(eval_weight(&wz, zeta).unwrap(), f64::INFINITY);
        assert!(eval_weight(&wz, c(1.0, 0.0)).is_err());
        let p = Weight::power(0.5).unwrap();
        assert_abs_diff_eq!(eval_weight(&p, c(0.6, 0.0)).unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn measure_validation() {
        assert!(AtomicMeasure::dirac(c(1.2, 0.0), 1.0).is_err());
        assert!(AtomicMeasure::dirac(c(0.2, 0.0), -1.0).is_err());
        assert!(SignedAtomicMeasure::new(vec![Atom::new(c(0.0, 0.0), 0.0)]).is_err());
        assert!(SignedAtomicMeasure::new(vec![Atom::new(c(0.0, 0.0), -2.0)]).is_ok());
        assert!(Weight::power(1.5).is_err());
    }

    #[test]
    fn unit_atoms_have_unit_mass() {
        let r = rule();
        for zeta in [c(0.0, 0.0), c(0.3, 0.4), c(0.7, 0.0), c(0.0, 0.8), c(1.0, 0.0), C64::from_polar(1.0, PI / 3.0)] {
            let w = Weight::unit_atom(zeta).unwrap();
            assert_abs_diff_eq!(l1_norm(&w, &r).unwrap(), 1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn power_weight_mass() {
        let r = rule();
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let w = Weight::power(alpha).unwrap();
            assert_abs_diff_eq!(l1_norm(&w, &r).unwrap(), 1.0 / (alpha + 1.0), epsilon = 1e-8);
        }
    }

    /// Moments of a unit atom from the boundary difference-quotient formula:
    /// `int v^n conj(v)^m w_zeta dA = sum_{j <= min(n,m)} zeta^{n-j} conj(zeta)^{m-j} / ((n+1)(m+1))`.
    fn douglas_moment(zeta: C64, n: usize, m: usize) -> C64 {
        let s: C64 = (0..=n.min(m))
            .map(|j| zeta.powu((n - j) as u32) * zeta.conj().powu((m - j) as u32))
            .sum();
        s / ((n + 1) * (m + 1)) as f64
    }

    #[test]
    fn atom_moments_match_boundary_formula() {
        let r = make_disk_rule(200, 16).unwrap();
        for zeta in [c(0.0, 0.0), c(0.3, 0.4), c(0.7, 0.0), c(0.0, 0.8), c(1.0, 0.0), C64::from_polar(1.0, PI / 3.0)] {
            let t = MomentTable::compute(&Weight::unit_atom(zeta).unwrap(), &r, 40).unwrap();
            for n in 0..=40 {
                for m in 0..=40 {
                    // M(n, m) integrates conj(v)^n v^m, the conjugate of the oracle's pairing.
                    let want = douglas_moment(zeta, m, n);
                    let got = t.get(n, m);
                    assert!((got - want).norm() < 1e-10, "zeta={zeta} n={n} m={m} got={got} want={want}");
                }
            }
        }
    }

    #[test]
    fn bergman_closed_forms() {
        let r = rule();
        let one = Weight::power(0.0).unwrap();
        let w0 = Weight::unit_atom(c(0.0, 0.0)).unwrap();
        let w1 = Weight::unit_atom(c(1.0, 0.0)).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.2), c(-0.6, 0.6), c(0.9, 0.0)] {
            assert_abs_diff_eq!((bergman_projection(&one, z, &r).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((bergman_projection(&w0, z, &r).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-6);
            let want = 1.0 / (c(1.0, 0.0) - z);
            assert_abs_diff_eq!((bergman_projection(&w1, z, &r).unwrap() - want).norm(), 0.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn berezin_closed_forms() {
        let r = rule();
        let one = Weight::power(0.0).unwrap();
        let w0 = Weight::unit_atom(c(0.0, 0.0)).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.2), c(-0.6, 0.6), c(0.0, -0.9)] {
            assert_abs_diff_eq!(berezin(&one, z, &r).unwrap(), 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(berezin(&w0, z, &r).unwrap(), 1.0 - z.norm_sqr(), epsilon = 1e-4);
        }
        let w = Weight::unit_atom(c(0.3, 0.4)).unwrap();
        let t = WeightTransforms::new(&w, &r);
        assert_abs_diff_eq!(t.berezin(c(0.0, 0.0)).unwrap(), t.l1_norm().unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn sampled_weight_uses_area_rule() {
        let r = make_disk_rule(200, 256).unwrap();
        let s = Weight::Sampled(SampledWeight::from_fn(|z| 1.0 - z.norm_sqr()));
        assert_abs_diff_eq!(l1_norm(&s, &r).unwrap(), 0.5, epsilon = 1e-10);
        let t = WeightTransforms::new(&s, &r);
        assert_abs_diff_eq!(t.berezin(c(0.0, 0.0)).unwrap(), t.l1_norm().unwrap(), epsilon = 1e-10);
        let grid = PolarGrid {
            radii: vec![0.0, 0.5, 0.99],
            n_theta: 4,
            values: vec![vec![2.0; 4], vec![2.0; 4], vec![2.0; 4]],
        };
        let w = WeightSpec::Sampled(grid).into_weight().unwrap();
        assert_abs_diff_eq!(eval_weight(&w, c(0.2, 0.7)).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn qb_identity_for_single_atoms() {
        let r = rule();
        let grid = default_qb_grid();
        let w0 = Weight::unit_atom(c(0.0, 0.0)).unwrap();
        assert!(qb_residual(&w0, &grid, &r).unwrap() <= 1e-6);
        for zeta in [c(0.3, 0.4), c(0.7, 0.0), c(0.0, 0.5), c(1.0, 0.0), C64::from_polar(1.0, PI / 3.0)] {
            let w = Weight::unit_atom(zeta).unwrap();
            let res = qb_residual(&w, &grid, &r).unwrap();
            assert!(res <= 1e-3, "zeta={zeta} residual={res}");
        }
    }

    #[test]
    fn moment_relation_small_cases() {
        let dirac = SignedAtomicMeasure::new(vec![Atom::new(c(0.5, 0.1), 3.0)]).unwrap();
        assert!(moment_residual(&dirac, 6, 6) <= 1e-14);
        let mix = SignedAtomicMeasure::new(vec![Atom::new(c(0.0, 0.0), 0.5), Atom::new(c(0.5, 0.0), 0.5)]).unwrap();
        let t = moment_residual_table(&mix, 1, 1);
        assert_abs_diff_eq!(t[1][1], 1.0 / 16.0, epsilon = 1e-15);
        let empty = SignedAtomicMeasure::new(vec![]).unwrap();
        assert_eq!(moment_residual(&empty, 4, 4), 0.0);
    }

    #[test]
    fn merged_single_point_has_zero_residual() {
        let split = SignedAtomicMeasure::new(vec![Atom::new(c(0.2, 0.2), 1.0), Atom::new(c(0.2, 0.2), 2.5)]).unwrap();
        assert_eq!(split.merged(1e-14).len(), 1);
        assert!(moment_residual(&split, 5, 5) <= 1e-14);
    }

    #[test]
    fn weight_json() {
        let w = WeightSpec::parse(r#"{"kind":"atomic","atoms":[{"point":[0.5,0.0],"mass":2.0}]}"#)
            .unwrap()
            .into_weight()
            .unwrap();
        match &w {
            Weight::Superharmonic(mu) => assert_eq!(mu.total_mass(), 2.0),
            _ => panic!("expected atomic weight"),
        }
        let p = WeightSpec::parse(r#"{"kind":"power","alpha":0.5}"#).unwrap().into_weight().unwrap();
        assert!(matches!(p, Weight::Power(a) if a == 0.5));
        assert!(WeightSpec::parse(r#"{"kind":"power","alpha":2}"#).unwrap().into_weight().is_err());
        assert!(WeightSpec::parse(r#"{"kind":"nope"}"#).is_err());
    }
}
