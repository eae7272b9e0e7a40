//! Quadrature on the unit disk (normalized area measure) and on the circle.
//!
//! The disk rule is a polar tensor rule: Gauss–Legendre in the radius against
//! the density `2r dr`, and a uniform angular grid. Rings close to the circle
//! get more angular nodes (see [`DiskRule`]) so that Poisson-type integrands,
//! whose angular width shrinks like `1 - r`, are resolved.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::trace;
use crate::{Error, Result, C64};

pub const DEFAULT_RADIAL_NODES: usize = 400;
pub const DEFAULT_ANGULAR_NODES: usize = 2048;

/// A ring at radius `r` gets at least `GRADING / (1 - r)` angular nodes.
/// The angular trapezoid error for a Poisson kernel on such a ring is about
/// `2 exp(-GRADING)`.
const GRADING: f64 = 8.0;
const MAX_RING_NODES: usize = 1 << 22;

/// Gauss–Legendre nodes and weights on `[0, 1]`, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitGauss {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl UnitGauss {
    pub fn new(n: usize) -> Result<Self> {
        let deg = NonZeroUsize::new(n)
            .ok_or_else(|| Error::InvalidParameter("Gauss rule needs at least one node".into()))?;
        let rule = GaussLegendre::new(deg);
        let mut pairs: Vec<(f64, f64)> = rule
            .iter()
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (a + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let vals: Vec<f64> = self.on(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&vals)
    }
}

/// Polar tensor rule for `dA = (1/pi) r dr dtheta`.
///
/// Ring `i` sits at `radial_nodes[i]` with weight `radial_weights[i]`
/// (the Gauss weight times `2r`, so the weights sum to one) and carries
/// `ring_nodes[i] >= n_theta` equally spaced angular nodes at
/// `phase + (k + 1/2) 2 pi / ring_nodes[i]`. The half step keeps the
/// direction `phase` itself free of nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskRule {
    gauss: UnitGauss,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
    ring_nodes: Vec<usize>,
    n_theta: usize,
    phase: f64,
}

/// Builds the polar rule with `n_r` radial and (at least) `n_theta` angular
/// nodes per ring.
pub fn make_disk_rule(n_r: usize, n_theta: usize) -> Result<DiskRule> {
    trace::record("make_disk_rule");
    if n_r < 2 {
        return Err(Error::InvalidParameter(format!("n_r = {n_r} < 2")));
    }
    if n_theta < 4 {
        return Err(Error::InvalidParameter(format!("n_theta = {n_theta} < 4")));
    }
    let gauss = UnitGauss::new(n_r)?;
    let radial_nodes = gauss.nodes.clone();
    let radial_weights = gauss
        .nodes
        .iter()
        .zip(&gauss.weights)
        .map(|(&r, &w)| 2.0 * r * w)
        .collect();
    let ring_nodes = radial_nodes
        .iter()
        .map(|&r| {
            let need = (GRADING / (1.0 - r)).ceil() as usize;
            if need <= n_theta {
                n_theta
            } else {
                need.next_power_of_two().min(MAX_RING_NODES).max(n_theta)
            }
        })
        .collect();
    Ok(DiskRule {
        gauss,
        radial_nodes,
        radial_weights,
        ring_nodes,
        n_theta,
        phase: 0.0,
    })
}

impl DiskRule {
    pub fn default_rule() -> Self {
        make_disk_rule(DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES).expect("default rule")
    }

    /// Same rule with the angular grid rotated so that direction `phase`
    /// sits halfway between two nodes on every ring.
    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_r(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn ring_nodes(&self) -> &[usize] {
        &self.ring_nodes
    }

    /// The underlying Gauss–Legendre rule on `[0, 1]` (without the `2r`
    /// factor), for one-dimensional radial integrals.
    pub fn gauss(&self) -> &UnitGauss {
        &self.gauss
    }

    pub fn total_nodes(&self) -> usize {
        self.ring_nodes.iter().sum()
    }

    /// Sum of all node weights; one up to rounding.
    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.radial_weights)
    }

    fn ring_angle(&self, n: usize, k: usize) -> f64 {
        self.phase + (k as f64 + 0.5) * 2.0 * PI / n as f64
    }
}

/// Outcome of a disk integral that tolerates infinite samples.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskIntegral {
    pub value: C64,
    /// Nodes whose integrand value was `+inf` and which were dropped.
    pub skipped: Vec<C64>,
}

/// `int_D g dA`. Fails on the first non-finite integrand value.
pub fn integrate_disk<G: Fn(C64) -> C64>(g: G, rule: &DiskRule) -> Result<C64> {
    trace::record("integrate_disk");
    Ok(integrate_disk_impl(&g, rule, false)?.value)
}

/// Like [`integrate_disk`] but drops nodes where the integrand is `+inf`
/// (integrable point singularities of a weight) and reports them.
pub fn integrate_disk_skipping<G: Fn(C64) -> C64>(g: G, rule: &DiskRule) -> Result<DiskIntegral> {
    trace::record("integrate_disk");
    integrate_disk_impl(&g, rule, true)
}

fn integrate_disk_impl<G: Fn(C64) -> C64>(
    g: &G,
    rule: &DiskRule,
    skip_infinite: bool,
) -> Result<DiskIntegral> {
    let mut skipped = Vec::new();
    let mut ring_re = Vec::with_capacity(rule.n_r());
    let mut ring_im = Vec::with_capacity(rule.n_r());
    let mut re = Vec::new();
    let mut im = Vec::new();
    for ((&r, &w), &n) in rule
        .radial_nodes
        .iter()
        .zip(&rule.radial_weights)
        .zip(&rule.ring_nodes)
    {
        re.clear();
        im.clear();
        for k in 0..n {
            let z = C64::from_polar(r, rule.ring_angle(n, k));
            let v = g(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                if skip_infinite && (v.re == f64::INFINITY) {
                    skipped.push(z);
                    continue;
                }
                return Err(Error::NonFinite(z));
            }
            re.push(v.re);
            im.push(v.im);
        }
        let scale = w / n as f64;
        ring_re.push(scale * pairwise_sum(&re));
        ring_im.push(scale * pairwise_sum(&im));
    }
    Ok(DiskIntegral {
        value: C64::new(pairwise_sum(&ring_re), pairwise_sum(&ring_im)),
        skipped,
    })
}

/// `(1/2pi) int_T g |dlambda|` by the `m`-point trapezoid rule (the mean of
/// the samples at the roots of unity).
pub fn integrate_circle<G: Fn(C64) -> C64>(g: G, m: usize) -> Result<C64> {
    trace::record("integrate_circle");
    if m == 0 {
        return Err(Error::InvalidParameter("empty circle grid".into()));
    }
    let mut re = Vec::with_capacity(m);
    let mut im = Vec::with_capacity(m);
    for j in 0..m {
        let z = crate::series::root_of_unity(j, m);
        let v = g(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(z));
        }
        re.push(v.re);
        im.push(v.im);
    }
    let inv = 1.0 / m as f64;
    Ok(C64::new(pairwise_sum(&re) * inv, pairwise_sum(&im) * inv))
}

/// Pairwise (cascade) summation; the association order depends only on the
/// length, so results are reproducible.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rule_is_normalized_and_positive() {
        let rule = make_disk_rule(50, 64).unwrap();
        assert_abs_diff_eq!(rule.total_weight(), 1.0, epsilon = 1e-12);
        assert!(rule.radial_weights().iter().all(|&w| w > 0.0));
        assert!(rule.radial_nodes().iter().all(|&r| r > 0.0 && r < 1.0));
        let one = integrate_disk(|_| C64::new(1.0, 0.0), &rule).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_tiny_rules() {
        assert!(make_disk_rule(1, 64).is_err());
        assert!(make_disk_rule(10, 3).is_err());
    }

    #[test]
    fn second_moment() {
        let rule = make_disk_rule(50, 64).unwrap();
        let v = integrate_disk(|z| C64::new(z.norm_sqr(), 0.0), &rule).unwrap();
        assert_abs_diff_eq!(v.re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn monomial_moments() {
        let rule = make_disk_rule(50, 64).unwrap();
        for n in 0..=20 {
            for m in 0..=20 {
                let v = integrate_disk(|z| z.powu(n) * z.conj().powu(m), &rule).unwrap();
                let want = if n == m { 1.0 / (n as f64 + 1.0) } else { 0.0 };
                assert_abs_diff_eq!((v - C64::new(want, 0.0)).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn logarithmic_and_poisson_integrands() {
        let rule = make_disk_rule(400, 2048).unwrap();
        let log = integrate_disk(|z| C64::new(2.0 * (1.0 / z.norm()).ln(), 0.0), &rule).unwrap();
        assert_abs_diff_eq!(log.re, 1.0, epsilon = 1e-6);
        let one = C64::new(1.0, 0.0);
        let poisson =
            integrate_disk(|z| C64::new((1.0 - z.norm_sqr()) / (one - z).norm_sqr(), 0.0), &rule)
                .unwrap();
        assert_abs_diff_eq!(poisson.re, 1.0, epsilon = 1e-4);
        let c = integrate_disk(|_| C64::new(2.5, -1.0), &rule).unwrap();
        assert_abs_diff_eq!((c - C64::new(2.5, -1.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = make_disk_rule(400, 2048).unwrap();
        let fine = make_disk_rule(800, 4096).unwrap();
        let one = C64::new(1.0, 0.0);
        let poisson = |z: C64| C64::new((1.0 - z.norm_sqr()) / (one - z).norm_sqr(), 0.0);
        let log = |z: C64| C64::new(2.0 * (1.0 / z.norm()).ln(), 0.0);
        let a = integrate_disk(poisson, &coarse).unwrap().re;
        let b = integrate_disk(poisson, &fine).unwrap().re;
        assert!((a - b).abs() < 1e-4);
        let a = integrate_disk(log, &coarse).unwrap().re;
        let b = integrate_disk(log, &fine).unwrap().re;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn non_finite_is_reported() {
        let rule = make_disk_rule(4, 8).unwrap();
        let err = integrate_disk(|_| C64::new(f64::NAN, 0.0), &rule).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        let out = integrate_disk_skipping(
            |z| {
                if z.re > 0.0 && z.im.abs() < 0.5 * z.re {
                    C64::new(f64::INFINITY, 0.0)
                } else {
                    C64::new(1.0, 0.0)
                }
            },
            &rule,
        )
        .unwrap();
        assert!(!out.skipped.is_empty());
    }

    #[test]
    fn circle_means() {
        let one = integrate_circle(|_| C64::new(1.0, 0.0), 16).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-15);
        let v = integrate_circle(|l| C64::new((l - 1.0).norm_sqr(), 0.0), 16).unwrap();
        assert_abs_diff_eq!(v.re, 2.0, epsilon = 1e-14);
        let half = C64::new(0.5, 0.0);
        let k = integrate_circle(|l| C64::new((1.0 / (1.0 - half * l)).norm_sqr(), 0.0), 1024).unwrap();
        assert_abs_diff_eq!(k.re, 4.0 / 3.0, epsilon = 1e-10);
        let bad = integrate_circle(|_| C64::new(f64::INFINITY, 0.0), 4);
        assert!(matches!(bad, Err(Error::NonFinite(_))));
    }
}
