//! Parameter sweeps for the relations that are only known to hold for single
//! atoms. The output is a table, one row per parameter value.

use serde::Serialize;

use crate::quadrature::DiskRule;
use crate::weights::{moment_residual_table, Atom, AtomicMeasure, SignedAtomicMeasure};
use crate::{Result, C64};

use super::{normalized_qb_residual, phieqn_residual};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// Two-atom family `(1 - s) delta_0 + s delta_t` for real `t`.
#[derive(Clone, Debug)]
pub struct QbScan {
    pub positions: Vec<f64>,
    pub splits: Vec<f64>,
}

impl Default for QbScan {
    fn default() -> Self {
        Self {
            positions: vec![0.25, 0.5, 0.75, 0.9, 1.0],
            splits: vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0],
        }
    }
}

/// QB and phi-equation residuals over the family, each weight scaled to unit
/// mass. Columns: `t, s, mass, qb_residual, phieqn_residual`.
pub fn scan_qb(params: &QbScan, grid: &[C64], rule: &DiskRule) -> Result<ScanTable> {
    let mut rows = Vec::new();
    for &t in &params.positions {
        for &s in &params.splits {
            let mut atoms = Vec::new();
            if s < 1.0 {
                atoms.push(Atom::new(C64::new(0.0, 0.0), 1.0 - s));
            }
            if s > 0.0 {
                atoms.push(Atom::new(C64::new(t, 0.0), s));
            }
            let mu = AtomicMeasure::new(atoms)?;
            let (qb, mass) = normalized_qb_residual(&mu, grid, rule)?;
            let phi = phieqn_residual(&mu.scaled(1.0 / mass)?, grid, rule)?;
            rows.push(vec![t, s, mass, qb, phi]);
        }
    }
    Ok(ScanTable {
        columns: vec!["t", "s", "mass", "qb_residual", "phieqn_residual"],
        rows,
    })
}

/// Signed family `delta_0 + c delta_t` for real `t`.
#[derive(Clone, Debug)]
pub struct MomentScan {
    pub positions: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub order: usize,
}

impl Default for MomentScan {
    fn default() -> Self {
        Self {
            positions: vec![0.25, 0.5, 0.75, 1.0],
            coefficients: vec![-1.0, -0.5, 0.5, 1.0, 2.0],
            order: 4,
        }
    }
}

/// Moment-relation residuals. Columns: `t, c, residual, n, m` where `(n, m)`
/// is where the maximum occurs.
pub fn scan_moments(params: &MomentScan) -> Result<ScanTable> {
    let mut rows = Vec::new();
    for &t in &params.positions {
        for &c in &params.coefficients {
            let mu = SignedAtomicMeasure::new(vec![
                Atom::new(C64::new(0.0, 0.0), 1.0),
                Atom::new(C64::new(t, 0.0), c),
            ])?;
            let table = moment_residual_table(&mu, params.order, params.order);
            let mut best = (0.0, 0, 0);
            for (n, row) in table.iter().enumerate() {
                for (m, &r) in row.iter().enumerate() {
                    if r > best.0 {
                        best = (r, n, m);
                    }
                }
            }
            rows.push(vec![t, c, best.0, best.1 as f64, best.2 as f64]);
        }
    }
    Ok(ScanTable {
        columns: vec!["t", "c", "residual", "n", "m"],
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::make_disk_rule;
    use crate::weights::polar_grid;

    #[test]
    fn moment_scan_small_case() {
        let t = scan_moments(&MomentScan {
            positions: vec![0.5],
            coefficients: vec![1.0],
            order: 2,
        })
        .unwrap();
        // delta_0 + delta_{1/2}: 2 * 1/4 - 1/2 * 1/2 = 1/4 at (1, 1).
        assert_eq!(t.rows, vec![vec![0.5, 1.0, 0.25, 1.0, 1.0]]);
    }

    #[test]
    fn qb_scan_endpoints_are_single_atoms() {
        let rule = make_disk_rule(100, 256).unwrap();
        let grid = polar_grid(0.9, 5, 8);
        let t = scan_qb(
            &QbScan {
                positions: vec![0.5],
                splits: vec![0.0, 0.5, 1.0],
            },
            &grid,
            &rule,
        )
        .unwrap();
        assert!(t.rows[0][3] < 1e-6 && t.rows[2][3] < 1e-6);
        assert!(t.rows[1][3] > 1e-6);
        assert!(t.rows.iter().all(|r| (r[2] - 1.0).abs() < 1e-10));
    }
}
