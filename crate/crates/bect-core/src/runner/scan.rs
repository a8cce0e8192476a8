//! Scaling-regime scans of the relative fringe fluctuation for plane
//! waves, from the closed forms.
//!
//! At the fringe the total fluctuation splits into two blocks:
//! a quantum block `N^3/4 - N n^2/12` and a window-statistics block
//! `n^4/180` (the cubic window term cancels between the quantum and
//! ensemble parts). Their balance point sits at `n ~ N^(3/4)`; whichever
//! block dominates sets the asymptotic decay of the relative fluctuation.

use serde::Serialize;

use crate::error::{Error, Result};

/// How the window dimension grows with the particle count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DimRule {
    /// `n = floor(N^gamma)` rounded down to odd (clamped to [1, N+1]).
    Power(f64),
    /// Fixed odd n.
    Fixed(u64),
}

impl DimRule {
    pub fn dim_for(&self, particles: u64) -> u64 {
        let n = match *self {
            DimRule::Power(gamma) => (particles as f64).powf(gamma).floor() as u64,
            DimRule::Fixed(n) => n,
        };
        let n = n.clamp(1, particles + 1);
        if n % 2 == 0 {
            n - 1
        } else {
            n
        }
    }
}

/// Scan family: a dimension rule over a sequence of particle counts.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub rule: DimRule,
    pub particle_counts: Vec<u64>,
}

/// Fluctuation block that dominates at a scan point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Quantum,
    Statistical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub particles: u64,
    pub dim: u64,
    /// Closed fringe mean, `N^2/4 - n^2/12`.
    pub mean: f64,
    /// Quantum fluctuation block, `N^3/4 - N n^2/12`.
    pub quantum_block: f64,
    /// Window-statistics block, `n^4/180`.
    pub statistical_block: f64,
    pub rel_total: f64,
    pub rel_quantum: f64,
    pub rel_statistical: f64,
    pub dominant: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    /// First particle count at which the statistical block dominates.
    pub particles: u64,
    pub dim: u64,
    /// `n / N^(3/4)` at the crossover point.
    pub dim_over_n34: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Log-log slope of the total relative fluctuation against N.
    pub slope_total: f64,
    /// Slope of the quantum block's relative fluctuation.
    pub slope_quantum: f64,
    /// Slope of the statistical block's relative fluctuation.
    pub slope_statistical: f64,
    /// Slope of the block that dominates at the largest N; this is the
    /// asymptotic decay law of the family.
    pub slope_dominant: f64,
    pub dominant: Regime,
    pub crossover: Option<Crossover>,
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Closed-form scaling scan at the plane-wave fringe.
pub fn scaling_scan(config: &ScanConfig) -> Result<ScanReport> {
    if config.particle_counts.len() < 3 {
        return Err(Error::ScanTooShort(config.particle_counts.len()));
    }
    let mut rows = Vec::with_capacity(config.particle_counts.len());
    for &big_n in &config.particle_counts {
        let dim = config.rule.dim_for(big_n);
        let nf = big_n as f64;
        let n = dim as f64;
        let mean = nf * nf / 4.0 - n * n / 12.0;
        let quantum_block = nf.powi(3) / 4.0 - nf * n * n / 12.0;
        let statistical_block = n.powi(4) / 180.0;
        let dominant = if statistical_block > quantum_block {
            Regime::Statistical
        } else {
            Regime::Quantum
        };
        rows.push(ScanRow {
            particles: big_n,
            dim,
            mean,
            quantum_block,
            statistical_block,
            rel_total: (quantum_block + statistical_block).sqrt() / mean,
            rel_quantum: quantum_block.sqrt() / mean,
            rel_statistical: statistical_block.sqrt() / mean,
            dominant,
        });
    }

    let logs = |f: &dyn Fn(&ScanRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter()
            .map(|r| ((r.particles as f64).ln(), f(r).ln()))
            .collect()
    };
    let slope_total = least_squares_slope(&logs(&|r| r.rel_total));
    let slope_quantum = least_squares_slope(&logs(&|r| r.rel_quantum));
    let slope_statistical = least_squares_slope(&logs(&|r| r.rel_statistical));
    let dominant = rows.last().unwrap().dominant;
    let slope_dominant = match dominant {
        Regime::Quantum => slope_quantum,
        Regime::Statistical => slope_statistical,
    };
    let crossover = rows
        .iter()
        .find(|r| r.dominant == Regime::Statistical)
        .map(|r| Crossover {
            particles: r.particles,
            dim: r.dim,
            dim_over_n34: r.dim as f64 / (r.particles as f64).powf(0.75),
        });

    Ok(ScanReport {
        rows,
        slope_total,
        slope_quantum,
        slope_statistical,
        slope_dominant,
        dominant,
        crossover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts() -> Vec<u64> {
        (8..=14).map(|e| 1u64 << e).collect()
    }

    #[test]
    fn dim_rule_rounds_down_to_odd() {
        assert_eq!(DimRule::Power(0.5).dim_for(256), 15);
        assert_eq!(DimRule::Power(0.9).dim_for(256), 147);
        assert_eq!(DimRule::Fixed(11).dim_for(1000), 11);
        assert_eq!(DimRule::Power(1.0).dim_for(4), 3);
    }

    #[test]
    fn square_root_family_decays_like_inverse_root_n() {
        let report = scaling_scan(&ScanConfig {
            rule: DimRule::Power(0.5),
            particle_counts: counts(),
        })
        .unwrap();
        assert!((report.slope_total + 0.5).abs() < 0.05, "{}", report.slope_total);
        assert_eq!(report.dominant, Regime::Quantum);
        assert!((report.slope_dominant + 0.5).abs() < 0.05);
        assert!(report.crossover.is_none());
    }

    #[test]
    fn steep_family_decays_like_the_window_block() {
        let report = scaling_scan(&ScanConfig {
            rule: DimRule::Power(0.9),
            particle_counts: counts(),
        })
        .unwrap();
        assert_eq!(report.dominant, Regime::Statistical);
        assert!(
            (report.slope_dominant + 0.2).abs() < 0.05,
            "{}",
            report.slope_dominant
        );
        // the mixed total sits between the two pure decay laws
        assert!(report.slope_total < -0.2 && report.slope_total > -0.5);
        let cross = report.crossover.unwrap();
        // blocks balance at n = (45 N^3)^(1/4), an order-one multiple of N^(3/4)
        assert!(
            cross.dim_over_n34 > 1.0 && cross.dim_over_n34 < 5.0,
            "{}",
            cross.dim_over_n34
        );
    }

    #[test]
    fn scan_is_deterministic() {
        let config = ScanConfig {
            rule: DimRule::Fixed(11),
            particle_counts: vec![64, 128, 256, 512],
        };
        assert_eq!(scaling_scan(&config).unwrap(), scaling_scan(&config).unwrap());
    }

    #[test]
    fn short_scans_are_rejected() {
        let config = ScanConfig {
            rule: DimRule::Fixed(11),
            particle_counts: vec![64, 128],
        };
        assert!(matches!(scaling_scan(&config), Err(Error::ScanTooShort(2))));
    }
}
