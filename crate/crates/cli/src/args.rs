//! Parsing of command-line values: inline JSON or JSON files, complex
//! numbers and grid sizes.

use std::fs;

use dirichlet_core::series::{RationalFn, RationalSpec};
use dirichlet_core::weights::{Atom, SignedAtomicMeasure, Weight, WeightSpec};
use dirichlet_core::Error;
use num_complex::Complex64;
use serde::Deserialize;

/// Inline JSON if the argument looks like JSON, otherwise the contents of
/// the file it names.
fn json_text(arg: &str) -> Result<String, Error> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

pub fn read_rational(arg: &str, symbol: bool) -> Result<RationalFn, Error> {
    let spec = RationalSpec::parse(&json_text(arg)?)?;
    if symbol {
        spec.into_symbol()
    } else {
        spec.into_strict()
    }
}

pub fn read_weight(arg: &str) -> Result<Weight, Error> {
    WeightSpec::parse(&json_text(arg)?)?.into_weight()
}

/// Atoms of a (possibly signed) measure `{"atoms": [{"point": [re, im], "mass": m}, ...]}`.
pub fn read_measure(arg: &str) -> Result<Vec<Atom>, Error> {
    #[derive(Deserialize)]
    struct Raw {
        atoms: Vec<Atom>,
    }
    let raw: Raw = serde_json::from_str(&json_text(arg)?)?;
    SignedAtomicMeasure::new(raw.atoms.clone())?;
    Ok(raw.atoms)
}

/// Accepts `0.3+0.4i`, `-i`, `2` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Some((re, im)) = s.split_once(',') {
        let re: f64 = re.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
        let im: f64 = im.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
        return Ok(Complex64::new(re, im));
    }
    s.parse::<Complex64>().map_err(|e| format!("{s:?}: {e}"))
}

/// `RADIIxANGLES`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("{s:?}: expected RADIIxANGLES"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if a < 2 || b < 1 {
        return Err(format!("{s:?}: need at least 2 radii and 1 angle"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0").unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(parse_complex("0.3+0.4i").unwrap(), Complex64::new(0.3, 0.4));
        assert_eq!(parse_complex("0.5, -0.25").unwrap(), Complex64::new(0.5, -0.25));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-1-2e-1i").unwrap(), Complex64::new(0.1, -0.2));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("15x16").unwrap(), (15, 16));
        assert!(parse_grid("15").is_err());
        assert!(parse_grid("1x4").is_err());
    }
}
