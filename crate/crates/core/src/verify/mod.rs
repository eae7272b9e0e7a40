//! Verification suites comparing independent routes to the same quantity.
//!
//! Each suite returns a list of [`CheckResult`]s in a fixed order. Checks
//! whose purpose is to show that a relation fails for a counterexample are
//! phrased as ordinary checks with residual `max(0, threshold - observed)`
//! and tolerance 0, so that every check passes when the expected behaviour
//! is observed.

pub mod scan;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::debranges::{
    closed_form_constants, f_plus, gram_matrix, hb_norm_sq, inner_factor_is_z_check, is_nonextreme,
    kernel_plus_norm_sq, min_hermitian_eigenvalue, pair_closed_form, pair_from_phi, point_symbol,
    toeplitz_conj_apply, InnerFactorCheck, PairBA, DEFAULT_PAIR_TRUNCATION,
};
use crate::dirichlet::{
    dilation_ratio, dirichlet_area, dirichlet_measure, dnorm_sq, local_dirichlet,
    local_dirichlet_kernel_closed_form, DilationTarget,
};
use crate::quadrature::{make_disk_rule, DiskRule, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES};
use crate::series::{
    cauchy_kernel, h2_inner, root_of_unity, sup_on_circle, ComplexPoly, RationalFn, DEFAULT_BOUNDARY_GRID,
    DEFAULT_TRUNCATION,
};
use crate::trace;
use crate::weights::{
    berezin, bergman_projection, eval_weight, l1_norm, moment_residual, moment_residual_table, polar_grid,
    qb_residual, Atom, AtomicMeasure, SignedAtomicMeasure, Weight, WeightTransforms,
};
use crate::{Error, Result, C64};

/// Operations that `verify all` must exercise.
pub const REQUIRED_OPS: &[&str] = &[
    "eval_weight",
    "l1_norm",
    "bergman_projection",
    "berezin",
    "qb_residual",
    "moment_residual",
    "dirichlet_area",
    "local_dirichlet",
    "dirichlet_measure",
    "dnorm_sq",
    "dilation_ratio",
    "pair_from_phi",
    "pair_closed_form",
    "toeplitz_conj_apply",
    "f_plus",
    "hb_norm_sq",
    "hb_kernel",
    "is_nonextreme",
    "inner_factor_is_z_check",
];

/// Tolerance for algebraic and closed-form comparisons.
pub const TOL_ALGEBRAIC: f64 = 1e-8;
/// Tolerance for quadrature against closed forms.
pub const TOL_QUADRATURE: f64 = 1e-4;
/// Tolerance for quadrature involving boundary atoms.
pub const TOL_BOUNDARY: f64 = 1e-3;

/// Threshold the two-atom counterexamples must exceed.
pub const MIXTURE_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    NormEquality,
    Douglas,
    Dilation,
    Qb,
    Moments,
    Phieqn,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::NormEquality,
        Suite::Douglas,
        Suite::Dilation,
        Suite::Qb,
        Suite::Moments,
        Suite::Phieqn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::NormEquality => "norm-equality",
            Suite::Douglas => "douglas",
            Suite::Dilation => "dilation",
            Suite::Qb => "qb",
            Suite::Moments => "moments",
            Suite::Phieqn => "phieqn",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a suite name; `all` selects every suite.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    Ok(vec![s.parse()?])
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub nr: usize,
    pub ntheta: usize,
    /// Boundary grid for Douglas integrals.
    #[serde(rename = "M")]
    pub m: usize,
    /// Truncation for the `f^+` solve.
    #[serde(rename = "N")]
    pub n: usize,
    /// Tolerance for checks on user-supplied measures.
    pub tol: Option<f64>,
    /// QB/phi-equation grid: radii x angles.
    pub grid: (usize, usize),
    pub seed: u64,
    /// Optional user measure, checked in addition to the built-in cases.
    pub measure: Option<Vec<Atom>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            nr: DEFAULT_RADIAL_NODES,
            ntheta: DEFAULT_ANGULAR_NODES,
            m: 2048,
            n: DEFAULT_TRUNCATION,
            tol: None,
            grid: (15, 16),
            seed: 7,
            measure: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid_meta: Value,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub config: VerifyConfig,
    pub pass: bool,
    pub ops_exercised: Vec<&'static str>,
}

impl VerificationReport {
    /// Names of failed checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

/// Running maximum of a residual together with where it occurred.
struct Worst {
    value: f64,
    at: Value,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: 0.0,
            at: Value::Null,
        }
    }

    fn add(&mut self, r: f64, at: impl FnOnce() -> Value) {
        if r > self.value || r.is_nan() {
            self.value = r;
            self.at = at();
        }
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + y.abs())
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

fn outcome(name: &str, tolerance: f64, mut meta: Value, start: Instant, out: Result<Worst>) -> CheckResult {
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match out {
        Ok(w) => {
            if let Value::Object(m) = &mut meta {
                if !w.at.is_null() {
                    m.insert("worst_at".into(), w.at);
                }
            }
            CheckResult {
                name: name.to_string(),
                max_residual: w.value,
                tolerance,
                pass: w.value <= tolerance,
                grid_meta: meta,
                elapsed_ms,
                error: None,
            }
        }
        Err(e) => CheckResult {
            name: name.to_string(),
            max_residual: f64::MAX,
            tolerance,
            pass: false,
            grid_meta: meta,
            elapsed_ms,
            error: Some(e.to_string()),
        },
    }
}

fn check<F>(name: &str, tolerance: f64, meta: Value, body: F) -> CheckResult
where
    F: FnOnce() -> Result<Worst>,
{
    let start = Instant::now();
    outcome(name, tolerance, meta, start, body())
}

/// A check that passes when the observed value exceeds `threshold`.
fn expect_exceeds<F>(name: &str, threshold: f64, mut meta: Value, observe: F) -> CheckResult
where
    F: FnOnce() -> Result<(f64, Value)>,
{
    let start = Instant::now();
    let out = observe().map(|(obs, detail)| {
        if let Value::Object(m) = &mut meta {
            m.insert("observed".into(), json!(obs));
            m.insert("threshold".into(), json!(threshold));
            if !detail.is_null() {
                m.insert("detail".into(), detail);
            }
        }
        let mut w = Worst::new();
        w.add((threshold - obs).max(0.0), || Value::Null);
        w
    });
    outcome(name, 0.0, meta, start, out)
}

/// The six test points: interior, near-boundary and boundary.
pub fn test_zetas() -> Vec<C64> {
    vec![
        C64::new(0.0, 0.0),
        C64::new(0.3, 0.4),
        C64::new(0.7, 0.0),
        C64::new(0.0, 0.8),
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, PI / 3.0),
    ]
}

/// 25 kernel points with `|w| <= 0.85`: five radii times five angles.
pub fn kernel_points() -> Vec<C64> {
    let mut out = Vec::with_capacity(25);
    for r in [0.05, 0.25, 0.45, 0.65, 0.85] {
        for k in 0..5 {
            out.push(C64::from_polar(r, 0.3 + 2.0 * PI * k as f64 / 5.0));
        }
    }
    out
}

/// Polynomial of uniformly random degree in `1..=max_degree` with
/// coefficients uniform on the square `[0,1) x [0,1)`.
pub fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> ComplexPoly {
    let d = rng.random_range(1..=max_degree);
    ComplexPoly::new((0..=d).map(|_| C64::new(rng.random(), rng.random())).collect())
}

/// Point uniform in the disk of radius `r_max`.
fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> C64 {
    let r = r_max * rng.random::<f64>().sqrt();
    C64::from_polar(r, 2.0 * PI * rng.random::<f64>())
}

fn rng_for(cfg: &VerifyConfig, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(suite.stream());
    rng
}

fn kernel_fn(w: C64) -> RationalFn {
    RationalFn::new(
        ComplexPoly::constant(C64::new(1.0, 0.0)),
        ComplexPoly::new(vec![C64::new(1.0, 0.0), -w.conj()]),
    )
    .expect("kernel of an interior point")
}

fn is_interior(z: C64) -> bool {
    z.norm() < 1.0 - 1e-9
}

fn two_atom_mixture() -> AtomicMeasure {
    AtomicMeasure::new(vec![
        Atom::new(C64::new(0.0, 0.0), 0.5),
        Atom::new(C64::new(0.5, 0.0), 0.5),
    ])
    .expect("valid mixture")
}

fn user_positive_measure(cfg: &VerifyConfig) -> Option<Result<AtomicMeasure>> {
    cfg.measure.as_ref().map(|atoms| AtomicMeasure::new(atoms.clone()))
}

/// Runs the selected suites in declaration order.
pub fn run(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerificationReport> {
    let rule = make_disk_rule(cfg.nr, cfg.ntheta)?;
    let mut selected = suites.to_vec();
    selected.sort();
    selected.dedup();
    trace::start();
    let mut checks = Vec::new();
    for s in selected {
        let mut rng = rng_for(cfg, s);
        let out = match s {
            Suite::NormEquality => norm_equality(cfg, &rule, &mut rng),
            Suite::Douglas => douglas(cfg, &rule, &mut rng),
            Suite::Dilation => dilation(cfg, &rule, &mut rng),
            Suite::Qb => qb(cfg, &rule),
            Suite::Moments => moments(cfg),
            Suite::Phieqn => phieqn(cfg, &rule),
        };
        checks.extend(out);
    }
    let ops = trace::finish().into_iter().collect();
    Ok(VerificationReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
        config: cfg.clone(),
        ops_exercised: ops,
    })
}

fn numerical_pairs(zetas: &[C64]) -> Result<Vec<PairBA>> {
    zetas
        .iter()
        .map(|&z| pair_from_phi(&point_symbol(z)?, DEFAULT_BOUNDARY_GRID, DEFAULT_PAIR_TRUNCATION))
        .collect()
}

fn norm_equality(cfg: &VerifyConfig, rule: &DiskRule, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let zetas = test_zetas();
    let ws = kernel_points();
    let mut out = Vec::new();
    let pairs = numerical_pairs(&zetas);
    let pairs = match pairs {
        Ok(p) => p,
        Err(e) => {
            return vec![check("norm-equality/pair-construction", 0.0, json!({}), || Err(e))];
        }
    };
    let grid_meta = json!({"zetas": zetas.iter().map(|z| cjson(*z)).collect::<Vec<_>>(), "w_count": ws.len(), "w_max": 0.85, "residual": "|x-y|/(1+|y|)"});

    out.push(check("norm-equality/closed-form-fplus", TOL_ALGEBRAIC, grid_meta.clone(), || {
        let mut worst = Worst::new();
        for (zeta, pair) in zetas.iter().zip(&pairs) {
            for &w in &ws {
                let d = local_dirichlet_kernel_closed_form(w, *zeta);
                let k = kernel_plus_norm_sq(pair.phi(), w);
                worst.add(rel(k, d), || json!({"zeta": cjson(*zeta), "w": cjson(w)}));
            }
        }
        Ok(worst)
    }));

    let mut meta = grid_meta.clone();
    meta["N"] = json!(cfg.n);
    meta["pair_M"] = json!(DEFAULT_BOUNDARY_GRID);
    meta["pair_N"] = json!(DEFAULT_PAIR_TRUNCATION);
    out.push(check("norm-equality/fplus-solve", 1e-6, meta, || {
        let mut worst = Worst::new();
        for (zeta, pair) in zetas.iter().zip(&pairs) {
            for &w in &ws {
                let d = local_dirichlet_kernel_closed_form(w, *zeta);
                let g = f_plus(&cauchy_kernel(w, cfg.n)?, pair, cfg.n)?;
                worst.add(rel(g.h2_norm_sq(), d), || json!({"zeta": cjson(*zeta), "w": cjson(w)}));
            }
        }
        Ok(worst)
    }));

    let mut meta = grid_meta.clone();
    meta["M"] = json!(cfg.m);
    out.push(check("norm-equality/douglas-boundary", 1e-6, meta, || {
        let mut worst = Worst::new();
        for zeta in &zetas {
            for &w in &ws {
                let d = local_dirichlet_kernel_closed_form(w, *zeta);
                let v = local_dirichlet(&kernel_fn(w), *zeta, cfg.m)?.value;
                worst.add(rel(v, d), || json!({"zeta": cjson(*zeta), "w": cjson(w)}));
            }
        }
        Ok(worst)
    }));

    let mut meta = grid_meta.clone();
    meta["nr"] = json!(cfg.nr);
    meta["ntheta"] = json!(cfg.ntheta);
    meta["total_nodes"] = json!(rule.total_nodes());
    out.push(check("norm-equality/area", TOL_BOUNDARY, meta, || {
        let mut worst = Worst::new();
        for zeta in zetas.iter().filter(|z| is_interior(**z)) {
            let weight = Weight::unit_atom(*zeta)?;
            for &w in &ws {
                let d = local_dirichlet_kernel_closed_form(w, *zeta);
                let v = dirichlet_area(&kernel_fn(w), &weight, rule)?.value;
                worst.add(rel(v, d), || json!({"zeta": cjson(*zeta), "w": cjson(w)}));
            }
        }
        Ok(worst)
    }));

    let polys: Vec<ComplexPoly> = (0..10).map(|_| random_poly(rng, 8)).collect();
    out.push(check(
        "norm-equality/full-norm",
        TOL_ALGEBRAIC,
        json!({"polys": polys.len(), "max_degree": 8, "M": cfg.m}),
        || {
            let mut worst = Worst::new();
            for (zeta, pair) in zetas.iter().zip(&pairs) {
                for (i, f) in polys.iter().enumerate() {
                    let hb = hb_norm_sq(f, pair)?;
                    let d = h2_inner(f, f).re + local_dirichlet(f, *zeta, cfg.m)?.value;
                    worst.add(rel(hb, d), || json!({"zeta": cjson(*zeta), "poly": i}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check(
        "norm-equality/full-norm-area",
        TOL_QUADRATURE,
        json!({"polys": 2, "nr": cfg.nr, "ntheta": cfg.ntheta}),
        || {
            let mut worst = Worst::new();
            for (zeta, pair) in zetas.iter().zip(&pairs).filter(|(z, _)| is_interior(**z)) {
                let weight = Weight::unit_atom(*zeta)?;
                for (i, f) in polys.iter().take(2).enumerate() {
                    let hb = hb_norm_sq(f, pair)?;
                    let d = dnorm_sq(f, &weight, rule)?;
                    worst.add(rel(d, hb), || json!({"zeta": cjson(*zeta), "poly": i}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check(
        "norm-equality/pair-closed-form",
        1e-6,
        json!({"samples": 512, "pair_M": DEFAULT_BOUNDARY_GRID, "pair_N": DEFAULT_PAIR_TRUNCATION}),
        || {
            let mut worst = Worst::new();
            for (zeta, pair) in zetas.iter().zip(&pairs) {
                let exact = pair_closed_form(*zeta)?;
                let (sa, sb) = (pair.a_samples().subsample(512)?, pair.b_samples().subsample(512)?);
                let (ea, eb) = (exact.a_samples().subsample(512)?, exact.b_samples().subsample(512)?);
                for j in 0..512 {
                    let l = root_of_unity(j, 512);
                    let d = [
                        (pair.a().eval(l) - exact.a().eval(l)).norm(),
                        (pair.b().eval(l) - exact.b().eval(l)).norm(),
                        (sa.values()[j] - ea.values()[j]).norm(),
                        (sb.values()[j] - eb.values()[j]).norm(),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    worst.add(d, || json!({"zeta": cjson(*zeta), "sample": j}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check("norm-equality/pair-constants", 1e-12, json!({"zetas": zetas.len()}), || {
        let mut worst = Worst::new();
        for zeta in &zetas {
            let (a, b) = closed_form_constants(*zeta);
            let d1 = (a * b - zeta.conj()).norm();
            let d2 = (a * a + b.norm_sqr() - 2.0 - zeta.norm_sqr()).abs();
            worst.add(d1.max(d2), || cjson(*zeta));
        }
        Ok(worst)
    }));

    out.push(check("norm-equality/pair-identity", TOL_ALGEBRAIC, json!({"pairs": "numerical and closed-form"}), || {
        let mut worst = Worst::new();
        for (zeta, pair) in zetas.iter().zip(&pairs) {
            for p in [pair.clone(), pair_closed_form(*zeta)?] {
                let d = p.diagnostics();
                let r = d
                    .identity
                    .max((d.b_sup - 1.0 - 1e-10).max(0.0))
                    .max(d.symbol_mismatch)
                    .max(if d.a0 > 0.0 { d.a0_imag } else { f64::INFINITY });
                worst.add(r, || cjson(*zeta));
            }
        }
        Ok(worst)
    }));

    out.push(check("norm-equality/toeplitz-adjoint", TOL_ALGEBRAIC, json!({"N": cfg.n}), || {
        let mut worst = Worst::new();
        for (zeta, pair) in zetas.iter().zip(&pairs) {
            for &w in ws.iter().filter(|w| w.norm() <= 0.7) {
                let k = cauchy_kernel(w, 2 * cfg.n + 64)?;
                let got = toeplitz_conj_apply(pair.b(), &k, cfg.n);
                let want = k.truncate(cfg.n).scale(pair.b().eval(w).conj());
                worst.add(got.sub(&want).h2_norm(), || json!({"zeta": cjson(*zeta), "w": cjson(w)}));
            }
        }
        Ok(worst)
    }));

    out.push(check("norm-equality/kernel-positivity", 0.0, json!({"sets": 50, "points": 6, "floor": -1e-10}), || {
        let mut worst = Worst::new();
        for s in 0..50 {
            let pts: Vec<C64> = (0..6).map(|_| random_point(rng, 0.95)).collect();
            for (zeta, pair) in zetas.iter().zip(&pairs) {
                let ev = min_hermitian_eigenvalue(&gram_matrix(pair, &pts)?);
                worst.add((-1e-10 - ev).max(0.0), || json!({"zeta": cjson(*zeta), "set": s, "min_eig": ev}));
            }
        }
        Ok(worst)
    }));

    let n = cfg.n;
    let keep = n.saturating_sub(64);
    out.push(check(
        "norm-equality/fplus-stability",
        TOL_ALGEBRAIC,
        json!({"N": n, "N_alt": n + 32, "retained": keep + 1, "kernel_w_max": 0.7, "kernel_degree": 200}),
        || {
            let mut fs: Vec<ComplexPoly> = (0..20).map(|_| random_poly(rng, 10)).collect();
            for w in [0.3, 0.5, 0.7] {
                fs.push(cauchy_kernel(C64::from_polar(w, 1.0 + w), 200)?);
            }
            let mut worst = Worst::new();
            for (zeta, pair) in zetas.iter().zip(&pairs) {
                for (i, f) in fs.iter().enumerate() {
                    let g1 = f_plus(f, pair, n)?;
                    let g2 = f_plus(f, pair, n + 32)?;
                    let d = (0..=keep).map(|j| (g1.coeff(j) - g2.coeff(j)).norm()).fold(0.0, f64::max);
                    worst.add(d, || json!({"zeta": cjson(*zeta), "f": i}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check("norm-equality/kernel-reproducing", 1e-6, json!({"N": 200, "w_max": 0.6}), || {
        let mut worst = Worst::new();
        let fs: Vec<ComplexPoly> = (0..3).map(|_| random_poly(rng, 6)).collect();
        let n = 200.min(DEFAULT_PAIR_TRUNCATION);
        for (zeta, pair) in zetas.iter().zip(&pairs) {
            for w in [C64::new(0.2, 0.3), C64::new(-0.6, 0.1), C64::new(0.0, 0.0)] {
                let kw = cauchy_kernel(w, n)?;
                let kb = kw.sub(&pair.b().mul(&kw).truncate(n).scale(pair.b().eval(w).conj()));
                let kp = f_plus(&kb, pair, n)?;
                for (i, f) in fs.iter().enumerate() {
                    let fp = f_plus(f, pair, n)?;
                    let ip = h2_inner(f, &kb) + h2_inner(&fp, &kp);
                    worst.add((ip - f.eval(w)).norm(), || json!({"zeta": cjson(*zeta), "w": cjson(w), "f": i}));
                }
            }
        }
        Ok(worst)
    }));

    let grid = polar_grid(0.95, 12, 24);
    out.push(check(
        "norm-equality/nonextreme-inner-factor",
        0.0,
        json!({"M": DEFAULT_BOUNDARY_GRID, "grid_points": grid.len(), "residual": "number of pairs failing"}),
        || {
            let mut failures = 0.0;
            let mut logs = Vec::new();
            for (zeta, pair) in zetas.iter().zip(&pairs) {
                let ne = is_nonextreme(pair.b(), DEFAULT_BOUNDARY_GRID)?;
                let inner = inner_factor_is_z_check(pair, &grid);
                logs.push(json!({"zeta": cjson(*zeta), "log_integral": ne.log_integral, "excluded": ne.excluded, "inner_factor": inner}));
                if !ne.nonextreme || inner != InnerFactorCheck::Pass {
                    failures += 1.0;
                }
            }
            let mut worst = Worst::new();
            worst.add(failures, || Value::Null);
            worst.at = Value::Array(logs);
            Ok(worst)
        },
    ));
    out
}

fn douglas(cfg: &VerifyConfig, rule: &DiskRule, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let zetas = [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.3)];
    let polys: Vec<ComplexPoly> = (0..20).map(|_| random_poly(rng, 8)).collect();
    out.push(check(
        "douglas/area-vs-boundary",
        TOL_QUADRATURE,
        json!({"polys": polys.len(), "max_degree": 8, "zetas": zetas.iter().map(|z| cjson(*z)).collect::<Vec<_>>(), "nr": cfg.nr, "ntheta": cfg.ntheta, "M": cfg.m, "residual": "|area-boundary|/(1+boundary)"}),
        || {
            let mut worst = Worst::new();
            for zeta in zetas {
                let w = Weight::unit_atom(zeta)?;
                for (i, f) in polys.iter().enumerate() {
                    let area = dirichlet_area(f, &w, rule)?.value;
                    let bdry = local_dirichlet(f, zeta, cfg.m)?.value;
                    worst.add(rel(area, bdry), || json!({"zeta": cjson(zeta), "poly": i}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check(
        "douglas/kernel-closed-form",
        TOL_ALGEBRAIC,
        json!({"w_max": 0.7, "M": cfg.m}),
        || {
            let mut worst = Worst::new();
            for zeta in test_zetas() {
                for w in kernel_points().into_iter().filter(|w| w.norm() <= 0.7) {
                    let d = local_dirichlet_kernel_closed_form(w, zeta);
                    let v = local_dirichlet(&kernel_fn(w), zeta, cfg.m)?.value;
                    worst.add(rel(v, d), || json!({"zeta": cjson(zeta), "w": cjson(w)}));
                }
            }
            Ok(worst)
        },
    ));

    out.push(check("douglas/measure-average", 1e-12, json!({"M": cfg.m}), || {
        let mut worst = Worst::new();
        let w = C64::new(1.0 / 3.0, 0.0);
        let f = kernel_fn(w);
        let mix = two_atom_mixture();
        let want: f64 = mix
            .atoms()
            .iter()
            .map(|a| a.mass * local_dirichlet_kernel_closed_form(w, a.point))
            .sum();
        let got = dirichlet_measure(&f, &mix, cfg.m)?.value;
        worst.add(rel(got, want), || json!("mixture"));
        let doubled = dirichlet_measure(&f, &mix.scaled(2.0)?, cfg.m)?.value;
        worst.add(rel(doubled, 2.0 * got), || json!("linearity"));
        Ok(worst)
    }));
    out
}

fn dilation_measures() -> Vec<(&'static str, AtomicMeasure)> {
    let d = |z: C64| AtomicMeasure::dirac(z, 1.0).expect("valid atom");
    vec![
        ("delta_0", d(C64::new(0.0, 0.0))),
        ("delta_1", d(C64::new(1.0, 0.0))),
        ("delta_0.5", d(C64::new(0.5, 0.0))),
        (
            "half_delta_0+half_delta_1",
            AtomicMeasure::new(vec![
                Atom::new(C64::new(0.0, 0.0), 0.5),
                Atom::new(C64::new(1.0, 0.0), 0.5),
            ])
            .expect("valid mixture"),
        ),
    ]
}

fn r_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// `r (1 + |zeta|) / (1 + r |zeta|)`.
pub fn dilation_quotient_bound(zeta: C64, r: f64) -> f64 {
    let a = zeta.norm();
    r * (1.0 + a) / (1.0 + r * a)
}

fn dilation(cfg: &VerifyConfig, rule: &DiskRule, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let polys: Vec<ComplexPoly> = (0..100).map(|_| random_poly(rng, 10)).collect();
    let measures = dilation_measures();
    let rs = r_grid();
    let mut user = Vec::new();
    if let Some(m) = user_positive_measure(cfg) {
        match m {
            Ok(m) => user.push(("user", m)),
            Err(e) => out.push(check("dilation/user-measure", 0.0, json!({}), || Err(e))),
        }
    }
    let all: Vec<(&str, AtomicMeasure)> = measures.into_iter().chain(user).collect();

    let mut bound_worst = Worst::new();
    let mut squared_worst = Worst::new();
    let mut monotone_worst = Worst::new();
    let mut min_margin = f64::INFINITY;
    let start = Instant::now();
    let mut run_all = || -> Result<()> {
        for (label, mu) in &all {
            let single = (mu.atoms().len() == 1).then(|| mu.atoms()[0].point);
            for (i, f) in polys.iter().enumerate() {
                let mut prev = 0.0;
                for &r in &rs {
                    let ratio = dilation_ratio(f, DilationTarget::Measure(mu, cfg.m), r)?;
                    let base = dirichlet_measure(f, mu, cfg.m)?.value;
                    let dr = ratio * base;
                    let b1 = 2.0 * r / (1.0 + r);
                    bound_worst.add((dr - b1 * base - 1e-10).max(0.0), || {
                        json!({"measure": label, "poly": i, "r": r})
                    });
                    if let Some(z) = single {
                        let b2 = dilation_quotient_bound(z, r).powi(2);
                        squared_worst.add((dr - b2 * base - 1e-10).max(0.0), || {
                            json!({"measure": label, "poly": i, "r": r})
                        });
                        min_margin = min_margin.min(b2 - ratio);
                    }
                    monotone_worst.add((prev - dr - 1e-12 * prev).max(0.0), || {
                        json!({"measure": label, "poly": i, "r": r})
                    });
                    prev = dr;
                }
            }
        }
        Ok(())
    };
    let res = run_all();
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let meta = json!({"polys": polys.len(), "max_degree": 10, "measures": all.iter().map(|(l, _)| *l).collect::<Vec<_>>(), "r": rs, "M": cfg.m, "slack": 1e-10, "residual": "max(0, D(f_r) - bound D(f) - slack)"});
    let names = [
        "dilation/linear-bound",
        "dilation/squared-bound",
        "dilation/monotone",
    ];
    let worsts = [bound_worst, squared_worst, monotone_worst];
    for (name, w) in names.into_iter().zip(worsts) {
        let mut c = match &res {
            Ok(()) => check(name, 0.0, meta.clone(), || Ok(w)),
            Err(e) => {
                let e = e.clone();
                check(name, 0.0, meta.clone(), || Err(e))
            }
        };
        c.elapsed_ms = elapsed_ms / 3.0;
        if name == "dilation/squared-bound" {
            c.grid_meta["min_margin"] = json!(min_margin);
        }
        out.push(c);
    }

    out.push(check(
        "dilation/area-route",
        TOL_QUADRATURE,
        json!({"f": "z^2", "weight": "power 1", "r": 0.5, "nr": cfg.nr, "ntheta": cfg.ntheta}),
        || {
            let mut worst = Worst::new();
            let f = ComplexPoly::monomial(2, C64::new(1.0, 0.0));
            let w = Weight::power(1.0)?;
            let ratio = dilation_ratio(&f, DilationTarget::Weight(&w, rule), 0.5)?;
            worst.add((ratio - 0.0625).abs(), || Value::Null);
            Ok(worst)
        },
    ));

    let zetas = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.5, 0.0)];
    out.push(check(
        "dilation/sup-formula",
        TOL_ALGEBRAIC,
        json!({"M": DEFAULT_BOUNDARY_GRID, "zetas": zetas.iter().map(|z| cjson(*z)).collect::<Vec<_>>(), "r": rs}),
        || {
            let mut worst = Worst::new();
            for zeta in zetas {
                let phi = point_symbol(zeta)?;
                for &r in &rs {
                    let s = sup_on_circle(&phi.dilation_quotient(r)?, DEFAULT_BOUNDARY_GRID)?;
                    worst.add((s - dilation_quotient_bound(zeta, r)).abs(), || {
                        json!({"zeta": cjson(zeta), "r": r})
                    });
                }
            }
            Ok(worst)
        },
    ));
    out
}

fn qb_grid(cfg: &VerifyConfig) -> Vec<C64> {
    polar_grid(0.9, cfg.grid.0, cfg.grid.1)
}

fn qb_meta(cfg: &VerifyConfig, grid: &[C64]) -> Value {
    json!({"grid": format!("{}x{}", cfg.grid.0, cfg.grid.1), "r_max": 0.9, "points": grid.len(), "nr": cfg.nr, "ntheta": cfg.ntheta})
}

/// `max_z |(1 - |z|^2) |Q w(z)|^2 - B w(z)|` for the weight of `mu` scaled
/// to unit mass.
pub fn normalized_qb_residual(mu: &AtomicMeasure, grid: &[C64], rule: &DiskRule) -> Result<(f64, f64)> {
    let w = Weight::Superharmonic(mu.clone());
    let mass = l1_norm(&w, rule)?;
    let w = Weight::Superharmonic(mu.scaled(1.0 / mass)?);
    Ok((qb_residual(&w, grid, rule)?, mass))
}

fn qb(cfg: &VerifyConfig, rule: &DiskRule) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = qb_grid(cfg);
    let meta = qb_meta(cfg, &grid);
    let origin = Weight::unit_atom(C64::new(0.0, 0.0)).expect("origin atom");
    let one = Weight::unit_atom(C64::new(1.0, 0.0)).expect("boundary atom");

    out.push(check("qb/weight-evaluation", 1e-12, json!({"weight": "unit atom at 0"}), || {
        let mut worst = Worst::new();
        for &z in grid.iter().skip(1) {
            let v = eval_weight(&origin, z)?;
            worst.add(rel(v, -2.0 * z.norm().ln()), || cjson(z));
        }
        Ok(worst)
    }));

    out.push(check("qb/unit-mass", TOL_QUADRATURE, json!({"zetas": 6}), || {
        let mut worst = Worst::new();
        for zeta in test_zetas() {
            let v = l1_norm(&Weight::unit_atom(zeta)?, rule)?;
            worst.add((v - 1.0).abs(), || cjson(zeta));
        }
        Ok(worst)
    }));

    out.push(check("qb/bergman-origin", TOL_QUADRATURE, meta.clone(), || {
        let mut worst = Worst::new();
        let t = WeightTransforms::new(&origin, rule);
        for &z in &grid {
            worst.add((t.bergman(z)? - 1.0).norm(), || cjson(z));
        }
        worst.add((bergman_projection(&origin, C64::new(0.5, 0.0), rule)? - 1.0).norm(), || json!("single"));
        Ok(worst)
    }));

    out.push(check("qb/berezin-origin", TOL_QUADRATURE, meta.clone(), || {
        let mut worst = Worst::new();
        let t = WeightTransforms::new(&origin, rule);
        for &z in &grid {
            worst.add((t.berezin(z)? - (1.0 - z.norm_sqr())).abs(), || cjson(z));
        }
        let z = C64::new(0.3, -0.2);
        worst.add((berezin(&origin, z, rule)? - (1.0 - z.norm_sqr())).abs(), || json!("single"));
        Ok(worst)
    }));

    out.push(check("qb/bergman-boundary-atom", TOL_QUADRATURE, meta.clone(), || {
        let mut worst = Worst::new();
        let t = WeightTransforms::new(&one, rule);
        for &z in &grid {
            let want = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - z);
            worst.add((t.bergman(z)? - want).norm(), || cjson(z));
        }
        Ok(worst)
    }));

    out.push(check("qb/origin-atom", 1e-6, meta.clone(), || {
        let mut worst = Worst::new();
        worst.add(qb_residual(&origin, &grid, rule)?, || Value::Null);
        Ok(worst)
    }));

    out.push(check("qb/single-atoms", TOL_BOUNDARY, meta.clone(), || {
        let mut worst = Worst::new();
        for zeta in test_zetas().into_iter().chain([C64::new(0.5, 0.0), C64::new(0.0, 1.0)]) {
            let r = qb_residual(&Weight::unit_atom(zeta)?, &grid, rule)?;
            worst.add(r, || cjson(zeta));
        }
        Ok(worst)
    }));

    out.push(expect_exceeds(
        "qb/two-atom-mixture-fails",
        MIXTURE_THRESHOLD,
        meta.clone(),
        || normalized_qb_residual(&two_atom_mixture(), &grid, rule).map(|(r, m)| (r, json!({"mass": m}))),
    ));

    if let Some(m) = user_positive_measure(cfg) {
        let tol = cfg.tol.unwrap_or(TOL_BOUNDARY);
        out.push(check("qb/user-measure", tol, meta, || {
            let (r, mass) = normalized_qb_residual(&m?, &grid, rule)?;
            let mut worst = Worst::new();
            worst.add(r, || json!({"mass": mass}));
            Ok(worst)
        }));
    }
    out
}

fn moments(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const ORDER: usize = 4;
    let mut out = Vec::new();
    let meta = json!({"m_max": ORDER, "n_max": ORDER});
    out.push(check("moments/dirac-multiples", 1e-14, meta.clone(), || {
        let mut worst = Worst::new();
        for (z, mass) in [
            (C64::new(0.5, 0.1), 3.0),
            (C64::new(0.0, 0.0), 1.0),
            (C64::new(1.0, 0.0), 2.5),
            (C64::new(0.3, -0.8), 0.25),
            (C64::new(0.6, -0.6), -1.5),
        ] {
            let mu = SignedAtomicMeasure::new(vec![Atom::new(z, mass)])?;
            worst.add(moment_residual(&mu, ORDER, ORDER), || json!({"point": cjson(z), "mass": mass}));
        }
        Ok(worst)
    }));

    let signed = SignedAtomicMeasure::new(vec![
        Atom::new(C64::new(0.0, 0.0), 1.0),
        Atom::new(C64::new(0.5, 0.0), -1.0),
    ])
    .expect("valid signed measure");
    let signed_datum = moment_residual(&signed, ORDER, ORDER);
    let mix = two_atom_mixture().to_signed();
    let table = moment_residual_table(&mix, ORDER, ORDER);
    let mut m = meta.clone();
    m["signed_delta0_minus_delta_half"] = json!(signed_datum);
    out.push(expect_exceeds(
        "moments/two-atom-violates",
        1.0 / 16.0 - 1e-12,
        m,
        || Ok((table[1][1], json!({"max_over_table": moment_residual(&mix, ORDER, ORDER)}))),
    ));

    if let Some(atoms) = &cfg.measure {
        let tol = cfg.tol.unwrap_or(1e-14);
        out.push(check("moments/user-measure", tol, meta, || {
            let mu = SignedAtomicMeasure::new(atoms.clone())?;
            let table = moment_residual_table(&mu, ORDER, ORDER);
            let mut worst = Worst::new();
            for (n, row) in table.iter().enumerate() {
                for (m, &r) in row.iter().enumerate() {
                    worst.add(r, || json!({"n": n, "m": m}));
                }
            }
            Ok(worst)
        }));
    }
    out
}

/// `max_w |(|phi(w)|^2 - |w|^2 sum_k mass_k / |1 - zeta_k conj(w)|^2)| / (1 + rhs)`
/// with `phi(w) = w Q w(w)` for the weight of `mu`.
pub fn phieqn_residual(mu: &AtomicMeasure, grid: &[C64], rule: &DiskRule) -> Result<f64> {
    let t = WeightTransforms::new(&Weight::Superharmonic(mu.clone()), rule);
    let mut worst: f64 = 0.0;
    for &w in grid {
        let lhs = (w * t.bergman(w)?).norm_sqr();
        worst = worst.max(rel(lhs, phieqn_rhs(mu, w)));
    }
    Ok(worst)
}

fn phieqn_rhs(mu: &AtomicMeasure, w: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    w.norm_sqr()
        * mu.atoms()
            .iter()
            .map(|a| a.mass / (one - a.point * w.conj()).norm_sqr())
            .sum::<f64>()
}

fn phieqn(cfg: &VerifyConfig, rule: &DiskRule) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = qb_grid(cfg);
    let meta = qb_meta(cfg, &grid);
    out.push(check("phieqn/point-symbol", TOL_ALGEBRAIC, meta.clone(), || {
        let mut worst = Worst::new();
        for zeta in test_zetas() {
            let phi = point_symbol(zeta)?;
            let mu = AtomicMeasure::dirac(zeta, 1.0)?;
            for &w in &grid {
                worst.add(rel(phi.eval(w).norm_sqr(), phieqn_rhs(&mu, w)), || {
                    json!({"zeta": cjson(zeta), "w": cjson(w)})
                });
            }
        }
        Ok(worst)
    }));

    out.push(check("phieqn/bergman-symbol", TOL_QUADRATURE, meta.clone(), || {
        let mut worst = Worst::new();
        for zeta in test_zetas() {
            let r = phieqn_residual(&AtomicMeasure::dirac(zeta, 1.0)?, &grid, rule)?;
            worst.add(r, || cjson(zeta));
        }
        Ok(worst)
    }));

    out.push(expect_exceeds(
        "phieqn/two-atom-mixture-fails",
        MIXTURE_THRESHOLD,
        meta.clone(),
        || phieqn_residual(&two_atom_mixture(), &grid, rule).map(|r| (r, Value::Null)),
    ));

    if let Some(m) = user_positive_measure(cfg) {
        let tol = cfg.tol.unwrap_or(TOL_QUADRATURE);
        out.push(check("phieqn/user-measure", tol, meta, || {
            let mut worst = Worst::new();
            worst.add(phieqn_residual(&m?, &grid, rule)?, || Value::Null);
            Ok(worst)
        }));
    }
    out
}
