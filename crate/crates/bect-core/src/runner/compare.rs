//! Comparison of stat reports across provenances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::runner::{Estimate, StatReport};

/// Comparison thresholds: sampled quantities in combined standard errors,
/// non-sampled ones in units of the order-N^2 truncation band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareTolerances {
    pub se_units: f64,
    pub band_coeff: f64,
}

impl Default for CompareTolerances {
    fn default() -> Self {
        // the truncated terms come with order-one constants; 2 N^2 covers
        // the measured remainders at every tested size
        CompareTolerances {
            se_units: 5.0,
            band_coeff: 2.0,
        }
    }
}

/// One compared quantity at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub index: usize,
    pub quantity: &'static str,
    pub a: f64,
    pub b: f64,
    pub deviation: f64,
    /// The allowed deviation at this point.
    pub allowance: f64,
    /// deviation / allowance; at most 1 to pass.
    pub severity: f64,
    pub passed: bool,
}

/// Outcome of a report comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub passed: bool,
    pub rows: Vec<DeviationRow>,
    /// Index into `rows` of the worst offender.
    pub worst: Option<usize>,
}

fn compare_quantity(
    index: usize,
    quantity: &'static str,
    a: Estimate,
    b: Estimate,
    band: f64,
    tol: &CompareTolerances,
) -> DeviationRow {
    let deviation = (a.value - b.value).abs();
    let combined_se = (a.se * a.se + b.se * b.se).sqrt();
    // floor against rounding dust: constant observables estimated by f64
    // sums carry spreads of order (eps * N^2)^2, far below any physical
    // tolerance
    let dust = 1e-9 * band;
    let allowance = if combined_se > dust {
        tol.se_units * combined_se
    } else {
        (tol.band_coeff * band).max(dust)
    };
    let severity = if allowance > 0.0 {
        deviation / allowance
    } else if deviation == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    DeviationRow {
        index,
        quantity,
        a: a.value,
        b: b.value,
        deviation,
        allowance,
        severity,
        passed: severity <= 1.0,
    }
}

/// Compare two reports on the same grid. Sampled pairs are judged in
/// combined standard errors, non-sampled pairs against the stated
/// order-N^2 band.
pub fn compare_reports(
    a: &StatReport,
    b: &StatReport,
    tol: &CompareTolerances,
) -> Result<Comparison> {
    if a.particles != b.particles || a.dim != b.dim {
        return Err(Error::MixedSpecs);
    }
    if a.points.len() != b.points.len()
        || a.points
            .iter()
            .zip(&b.points)
            .any(|(x, y)| x.momentum != y.momentum)
    {
        return Err(Error::GridMismatch);
    }
    let band = (a.particles as f64) * (a.particles as f64);
    let mut rows = Vec::with_capacity(3 * a.points.len());
    for (i, (pa, pb)) in a.points.iter().zip(&b.points).enumerate() {
        rows.push(compare_quantity(i, "mean", pa.mean, pb.mean, band, tol));
        rows.push(compare_quantity(
            i,
            "ensemble_cov",
            pa.ensemble_cov,
            pb.ensemble_cov,
            band,
            tol,
        ));
        rows.push(compare_quantity(
            i,
            "quantum_cov_avg",
            pa.quantum_cov_avg,
            pb.quantum_cov_avg,
            band,
            tol,
        ));
    }
    let worst = rows
        .iter()
        .enumerate()
        .max_by(|(_, x), (_, y)| x.severity.total_cmp(&y.severity))
        .map(|(i, _)| i);
    Ok(Comparison {
        passed: rows.iter().all(|r| r.passed),
        rows,
        worst,
    })
}
