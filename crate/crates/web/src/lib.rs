//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array`; the layout is given on each
//! function.

use dirichlet_core::debranges::{pair_from_phi, point_symbol};
use dirichlet_core::dirichlet::{dilation_ratio, DilationTarget};
use dirichlet_core::quadrature::make_disk_rule;
use dirichlet_core::series::ComplexPoly;
use dirichlet_core::weights::{Atom, AtomicMeasure, Weight, WeightTransforms};
use dirichlet_core::C64;
use wasm_bindgen::prelude::*;

fn to_js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

/// Atoms from `[re, im, mass, re, im, mass, ...]`.
fn atoms_from_flat(flat: &[f64]) -> Result<AtomicMeasure, String> {
    if flat.is_empty() || !flat.len().is_multiple_of(3) {
        return Err("expected [re, im, mass] triples".into());
    }
    let atoms = flat
        .chunks_exact(3)
        .map(|t| Atom::new(C64::new(t[0], t[1]), t[2]))
        .collect();
    AtomicMeasure::new(atoms).map_err(|e| e.to_string())
}

/// Defect `(1 - |z|^2)|Q w(z)|^2 - B w(z)` of the unit-mass weight on an
/// `n x n` Cartesian grid over `[-1, 1]^2`; `NaN` outside the disk of radius
/// `0.98`. Row-major, first row at `y = 1`.
pub fn qb_field_native(atoms: &[f64], n: usize) -> Result<Vec<f64>, String> {
    let mu = atoms_from_flat(atoms)?;
    let rule = make_disk_rule(64, 64).map_err(|e| e.to_string())?;
    let raw = WeightTransforms::new(&Weight::Superharmonic(mu.clone()), &rule);
    let mass = raw.l1_norm().map_err(|e| e.to_string())?;
    let w = Weight::Superharmonic(mu.scaled(1.0 / mass).map_err(|e| e.to_string())?);
    let t = WeightTransforms::new(&w, &rule);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let x = -1.0 + 2.0 * (j as f64 + 0.5) / n as f64;
            let z = C64::new(x, y);
            out.push(if z.norm() < 0.98 {
                t.qb_defect(z).map_err(|e| e.to_string())?
            } else {
                f64::NAN
            });
        }
    }
    Ok(out)
}

/// For `steps` values of `r` in `(0, 1)`: `[r, ratio, 2r/(1+r), squared bound]`
/// per row, where `ratio = D(f_r)/D(f)` for the unit atom at `zeta` and `f`
/// has coefficients `[re, im, re, im, ...]`.
pub fn dilation_curve_native(coeffs: &[f64], zeta_re: f64, zeta_im: f64, steps: usize) -> Result<Vec<f64>, String> {
    if coeffs.len() < 4 || !coeffs.len().is_multiple_of(2) {
        return Err("expected at least two [re, im] coefficients".into());
    }
    let f = ComplexPoly::new(coeffs.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect());
    let zeta = C64::new(zeta_re, zeta_im);
    let mu = AtomicMeasure::dirac(zeta, 1.0).map_err(|e| e.to_string())?;
    let a = zeta.norm();
    let mut out = Vec::with_capacity(4 * steps);
    for k in 1..=steps {
        let r = 0.99 * k as f64 / steps as f64;
        let ratio = dilation_ratio(&f, DilationTarget::Measure(&mu, 256), r).map_err(|e| e.to_string())?;
        let sq = (r * (1.0 + a) / (1.0 + r * a)).powi(2);
        out.extend([r, ratio, 2.0 * r / (1.0 + r), sq]);
    }
    Ok(out)
}

/// Boundary moduli of the pair for `z / (1 - conj(zeta) z)` on `m` samples
/// (power of two): `[theta, |a|, |b|]` per row.
pub fn pair_moduli_native(zeta_re: f64, zeta_im: f64, m: usize) -> Result<Vec<f64>, String> {
    let phi = point_symbol(C64::new(zeta_re, zeta_im)).map_err(|e| e.to_string())?;
    let pair = pair_from_phi(&phi, m.max(64), 16.min(m / 4)).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * m);
    for (j, (a, b)) in pair.a_samples().values().iter().zip(pair.b_samples().values()).enumerate() {
        out.extend([2.0 * std::f64::consts::PI * j as f64 / m as f64, a.norm(), b.norm()]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn qb_field(atoms: &[f64], n: usize) -> Result<Vec<f64>, JsValue> {
    qb_field_native(atoms, n).map_err(to_js)
}

#[wasm_bindgen]
pub fn dilation_curve(coeffs: &[f64], zeta_re: f64, zeta_im: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    dilation_curve_native(coeffs, zeta_re, zeta_im, steps).map_err(to_js)
}

#[wasm_bindgen]
pub fn pair_moduli(zeta_re: f64, zeta_im: f64, m: usize) -> Result<Vec<f64>, JsValue> {
    pair_moduli_native(zeta_re, zeta_im, m).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_atom_field_vanishes() {
        let field = qb_field_native(&[0.5, 0.0, 2.0], 16).unwrap();
        let finite: Vec<f64> = field.iter().copied().filter(|v| v.is_finite()).collect();
        assert!(!finite.is_empty());
        let worst = finite.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn mixture_field_does_not_vanish() {
        let field = qb_field_native(&[0.0, 0.0, 0.5, 0.5, 0.0, 0.5], 16).unwrap();
        assert!(field.iter().filter(|v| v.is_finite()).any(|v| v.abs() > 1e-4));
    }

    #[test]
    fn dilation_curve_respects_bounds() {
        let rows = dilation_curve_native(&[0.0, 0.0, 1.0, 0.0, 0.3, 0.2], 1.0, 0.0, 10).unwrap();
        for row in rows.chunks_exact(4) {
            assert!(row[1] <= row[2] + 1e-10 && row[1] <= row[3] + 1e-10);
        }
    }

    #[test]
    fn pair_moduli_lie_on_the_circle() {
        let rows = pair_moduli_native(0.0, 0.0, 64).unwrap();
        assert_eq!(rows.len(), 3 * 64);
        for row in rows.chunks_exact(3) {
            assert!((row[1] * row[1] + row[2] * row[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(qb_field_native(&[0.0, 0.0], 4).is_err());
        assert!(dilation_curve_native(&[1.0], 0.0, 0.0, 3).is_err());
        assert!(pair_moduli_native(2.0, 0.0, 64).is_err());
    }
}
