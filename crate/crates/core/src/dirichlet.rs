//! Weighted Dirichlet integrals.
//!
//! Three routes are available and cross-checked by the verification suites:
//! the area integral of `|f'|^2 w` ([`dirichlet_area`]), the boundary
//! difference-quotient integral for a single atom ([`local_dirichlet`]) and
//! the mass-weighted sum of the latter over an atomic measure
//! ([`dirichlet_measure`]).

use serde::Serialize;

use crate::quadrature::{integrate_circle, integrate_disk_skipping, DiskRule};
use crate::series::Holomorphic;
use crate::trace;
use crate::weights::{AtomicMeasure, Weight};
use crate::{Error, Result, C64};

/// Largest dilation parameter accepted by [`dilation_ratio`].
pub const MAX_DILATION: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletMethod {
    AreaQuadrature,
    DouglasBoundary,
    MeasureAverage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirichletValue {
    pub value: f64,
    pub method: DirichletMethod,
    /// Quadrature nodes dropped because the weight was infinite there.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped_nodes: Vec<C64>,
}

impl DirichletValue {
    fn new(value: f64, method: DirichletMethod) -> Self {
        Self {
            value,
            method,
            skipped_nodes: Vec::new(),
        }
    }
}

/// `int_D |f'(z)|^2 w(z) dA(z)`.
///
/// For weights with a boundary atom the angular grid is rotated so the pole
/// direction falls halfway between nodes.
pub fn dirichlet_area<F: Holomorphic>(f: &F, w: &Weight, rule: &DiskRule) -> Result<DirichletValue> {
    trace::record("dirichlet_area");
    let rotated;
    let rule = match w.boundary_direction() {
        Some(phase) => {
            rotated = rule.clone().with_phase(phase);
            &rotated
        }
        None => rule,
    };
    let out = integrate_disk_skipping(
        |z| {
            let d = f.derivative_at(z).norm_sqr();
            if d == 0.0 {
                return C64::new(0.0, 0.0);
            }
            C64::new(d * w.eval_unchecked(z), 0.0)
        },
        rule,
    )?;
    Ok(DirichletValue {
        value: out.value.re,
        method: DirichletMethod::AreaQuadrature,
        skipped_nodes: out.skipped,
    })
}

/// Local Dirichlet integral at `zeta` in the closed disk:
/// `(1/2pi) int_T |(f(l) - f(zeta)) / (l - zeta)|^2 |dl|`, with the
/// difference quotient formed by exact deflation.
pub fn local_dirichlet<F: Holomorphic>(f: &F, zeta: C64, m: usize) -> Result<DirichletValue> {
    trace::record("local_dirichlet");
    if zeta.norm() > 1.0 + crate::weights::BOUNDARY_TOL {
        return Err(Error::OutsideClosedDisk(zeta));
    }
    let q = f.difference_quotient(zeta);
    let v = integrate_circle(|l| C64::new(q.eval(l).norm_sqr(), 0.0), m)?;
    Ok(DirichletValue::new(v.re, DirichletMethod::DouglasBoundary))
}

/// `sum_k mass_k D_{zeta_k}(f)`.
pub fn dirichlet_measure<F: Holomorphic>(f: &F, mu: &AtomicMeasure, m: usize) -> Result<DirichletValue> {
    trace::record("dirichlet_measure");
    let mut terms = Vec::with_capacity(mu.atoms().len());
    for a in mu.atoms() {
        terms.push(a.mass * local_dirichlet(f, a.point, m)?.value);
    }
    Ok(DirichletValue::new(
        crate::quadrature::pairwise_sum(&terms),
        DirichletMethod::MeasureAverage,
    ))
}

/// `||f||_{H^2}^2 + D_w(f)`.
pub fn dnorm_sq<F: Holomorphic>(f: &F, w: &Weight, rule: &DiskRule) -> Result<f64> {
    trace::record("dnorm_sq");
    Ok(f.h2_norm_sq() + dirichlet_area(f, w, rule)?.value)
}

/// Closed form `D_zeta(k_w) = |w|^2 / (|1 - conj(w) zeta|^2 (1 - |w|^2))`.
pub fn local_dirichlet_kernel_closed_form(w: C64, zeta: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    w.norm_sqr() / ((one - w.conj() * zeta).norm_sqr() * (1.0 - w.norm_sqr()))
}

/// What a dilation ratio is measured against.
#[derive(Clone, Copy, Debug)]
pub enum DilationTarget<'a> {
    /// Area quadrature with the given weight.
    Weight(&'a Weight, &'a DiskRule),
    /// Boundary formula summed over the atoms, `M` circle samples.
    Measure(&'a AtomicMeasure, usize),
}

impl DilationTarget<'_> {
    fn eval<F: Holomorphic>(&self, f: &F) -> Result<f64> {
        match *self {
            DilationTarget::Weight(w, rule) => Ok(dirichlet_area(f, w, rule)?.value),
            DilationTarget::Measure(mu, m) => Ok(dirichlet_measure(f, mu, m)?.value),
        }
    }
}

/// `D(f_r) / D(f)`, both evaluated by the same route.
pub fn dilation_ratio<F: Holomorphic>(f: &F, target: DilationTarget<'_>, r: f64) -> Result<f64> {
    trace::record("dilation_ratio");
    if !(0.0..=MAX_DILATION).contains(&r) {
        return Err(Error::DilationRange(r));
    }
    let base = target.eval(f)?;
    if base <= 0.0 {
        return Err(Error::ZeroDirichlet);
    }
    let fr = f.dilate(r)?;
    Ok(target.eval(&fr)? / base)
}
