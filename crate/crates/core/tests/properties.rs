use dirichlet_core::debranges::{closed_form_constants, f_plus, hb_norm_sq, pair_closed_form};
use dirichlet_core::dirichlet::{
    dilation_ratio, dirichlet_area, dirichlet_measure, local_dirichlet, local_dirichlet_kernel_closed_form,
    DilationTarget,
};
use dirichlet_core::quadrature::DiskRule;
use dirichlet_core::series::{cauchy_kernel, dilate, h2_inner, ComplexPoly, RationalFn};
use dirichlet_core::weights::{moment_residual, Atom, AtomicMeasure, SignedAtomicMeasure, Weight};
use dirichlet_core::C64;
use proptest::prelude::*;

fn complex_in_disk(r_max: f64) -> impl Strategy<Value = C64> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn closed_disk_point() -> impl Strategy<Value = C64> {
    prop_oneof![
        complex_in_disk(0.95),
        (0.0..std::f64::consts::TAU).prop_map(|t| C64::from_polar(1.0, t)),
    ]
}

fn poly(max_degree: usize) -> impl Strategy<Value = ComplexPoly> {
    proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..=max_degree + 1)
        .prop_map(|c| ComplexPoly::new(c.into_iter().map(|(x, y)| C64::new(x, y)).collect()))
}

fn kernel_fn(w: C64) -> RationalFn {
    RationalFn::new(
        ComplexPoly::constant(C64::new(1.0, 0.0)),
        ComplexPoly::new(vec![C64::new(1.0, 0.0), -w.conj()]),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_reproduces_values(f in poly(10), w in complex_in_disk(0.9)) {
        let k = cauchy_kernel(w, 10).unwrap();
        prop_assert!((h2_inner(&f, &k) - f.eval(w)).norm() <= 1e-12);
    }

    #[test]
    fn local_dirichlet_matches_kernel_closed_form(w in complex_in_disk(0.7), zeta in closed_disk_point()) {
        let got = local_dirichlet(&kernel_fn(w), zeta, 1024).unwrap().value;
        let want = local_dirichlet_kernel_closed_form(w, zeta);
        prop_assert!((got - want).abs() <= 1e-8 * (1.0 + want));
    }

    #[test]
    fn dilation_is_monotone_and_bounded(f in poly(10), zeta in closed_disk_point(), r0 in 0.05..0.9f64) {
        let mu = AtomicMeasure::dirac(zeta, 1.0).unwrap();
        let r1 = r0 + 0.05;
        let d0 = dirichlet_measure(&dilate(&f, r0).unwrap(), &mu, 256).unwrap().value;
        let d1 = dirichlet_measure(&dilate(&f, r1).unwrap(), &mu, 256).unwrap().value;
        prop_assert!(d0 <= d1 * (1.0 + 1e-12));
        let ratio = dilation_ratio(&f, DilationTarget::Measure(&mu, 256), r0).unwrap();
        prop_assert!(ratio <= 2.0 * r0 / (1.0 + r0) + 1e-10);
        let a = zeta.norm();
        let sq = (r0 * (1.0 + a) / (1.0 + r0 * a)).powi(2);
        prop_assert!(ratio <= sq + 1e-10);
    }

    #[test]
    fn pair_constants_algebra(zeta in closed_disk_point()) {
        let (a, b) = closed_form_constants(zeta);
        prop_assert!(a > 0.0);
        prop_assert!((a * b - zeta.conj()).norm() <= 1e-12);
        prop_assert!((a * a + b.norm_sqr() - 2.0 - zeta.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn hb_norm_equals_local_dirichlet_norm(f in poly(8), zeta in closed_disk_point()) {
        let pair = pair_closed_form(zeta).unwrap();
        let hb = hb_norm_sq(&f, &pair).unwrap();
        let d = f.h2_norm_sq() + local_dirichlet(&f, zeta, 256).unwrap().value;
        prop_assert!((hb - d).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn f_plus_of_kernel_is_scaled_kernel(w in complex_in_disk(0.7), zeta in closed_disk_point()) {
        let pair = pair_closed_form(zeta).unwrap();
        let k = cauchy_kernel(w, 128).unwrap();
        let g = f_plus(&k, &pair, 128).unwrap();
        let want = k.scale(pair.phi().eval(w).conj());
        for j in 0..=64 {
            prop_assert!((g.coeff(j) - want.coeff(j)).norm() <= 1e-10);
        }
    }

    #[test]
    fn dirac_multiples_satisfy_moment_relation(z in closed_disk_point(), mass in -3.0..3.0f64) {
        prop_assume!(mass.abs() > 1e-3);
        let mu = SignedAtomicMeasure::new(vec![Atom::new(z, mass)]).unwrap();
        prop_assert!(moment_residual(&mu, 4, 4) <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn area_formula_agrees_with_boundary_formula(f in poly(8), k in 0usize..3) {
        let zeta = [C64::new(0.0, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.3)][k];
        let rule = DiskRule::default_rule();
        let area = dirichlet_area(&f, &Weight::unit_atom(zeta).unwrap(), &rule).unwrap().value;
        let bdry = local_dirichlet(&f, zeta, 256).unwrap().value;
        prop_assert!((area - bdry).abs() <= 1e-4 * (1.0 + bdry));
    }
}
