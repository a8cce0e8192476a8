//! Monte Carlo experiments over sampled states and the three-way
//! closed / exact / Monte Carlo comparison machinery.

pub mod compare;
pub mod pattern;
pub mod scan;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::SectorOp;
use crate::analytics::covariance::{closed_cov_report, exact_cov_report, Provenance};
use crate::error::{Error, Result};
use crate::fock::{EnsembleSampler, SubspaceSpec};
use crate::models::{ModeKernel, Momentum};
use crate::wick::{build_r_poly, exact_mean_big_r, wick_product};

pub use compare::{compare_reports, Comparison, CompareTolerances, DeviationRow};
pub use pattern::{average_pattern, single_run_pattern, PatternRecord};
pub use scan::{scaling_scan, DimRule, Regime, ScanConfig, ScanReport, ScanRow};

/// A value with a batch-mean standard error (zero for non-sampled paths).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0 }
    }
}

/// Statistics of `R` at one grid momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KPointStats {
    pub momentum: Momentum,
    pub mean: Estimate,
    pub ensemble_cov: Estimate,
    pub quantum_cov_avg: Estimate,
}

/// Per-momentum statistics with one provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub particles: u64,
    pub dim: u64,
    pub provenance: Provenance,
    pub points: Vec<KPointStats>,
}

/// Everything one Monte Carlo run needs. The seed is mandatory; there is
/// no entropy-source default.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub spec: SubspaceSpec,
    pub kernel: ModeKernel,
    pub grid: Vec<Momentum>,
    pub samples: usize,
    pub seed: u64,
    pub batches: usize,
}

/// Default batch count for standard errors of the quartic statistics.
pub const DEFAULT_BATCHES: usize = 32;

impl ExperimentConfig {
    pub fn new(
        spec: SubspaceSpec,
        kernel: ModeKernel,
        grid: Vec<Momentum>,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if samples < 2 {
            return Err(Error::TooFewSamples(samples));
        }
        for k in &grid {
            kernel.check_momentum(k)?;
        }
        Ok(ExperimentConfig {
            spec,
            kernel,
            grid,
            samples,
            seed,
            batches: DEFAULT_BATCHES,
        })
    }

    pub fn with_batches(mut self, batches: usize) -> Self {
        self.batches = batches.max(2);
        self
    }
}

struct BatchSums {
    count: u64,
    /// per k: sum of (R - R_ref), sum of (R - R_ref)^2, sum of per-state
    /// quantum variance
    r1: Vec<f64>,
    r2: Vec<f64>,
    qv: Vec<f64>,
}

/// Monte Carlo estimates of the mean of `R`, the across-state variance of
/// its expectation value, and the average within-state quantum variance at
/// every grid momentum.
///
/// Per-state second moments go through the full contraction product, so
/// out-of-sector intermediates are included. Accumulation is centered on
/// the exact-trace mean to keep the variance free of cancellation, and
/// batches combine in a fixed order so thread count cannot change results.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<StatReport> {
    let spec = config.spec;
    let nf = spec.particles() as f64;
    let mut r_ops = Vec::with_capacity(config.grid.len());
    let mut w_ops = Vec::with_capacity(config.grid.len());
    let mut r_ref = Vec::with_capacity(config.grid.len());
    for k in &config.grid {
        r_ops.push(SectorOp::new(&build_r_poly(&config.kernel, k)?, &spec)?);
        w_ops.push(SectorOp::new(
            &wick_product(&config.kernel, k, k)?,
            &spec,
        )?);
        r_ref.push(exact_mean_big_r(&spec, &config.kernel, k)?);
    }

    let m = config.samples;
    let b = config.batches.clamp(2, m);
    let ranges: Vec<(u64, u64)> = (0..b)
        .map(|i| ((i * m / b) as u64, ((i + 1) * m / b) as u64))
        .collect();
    let sampler = EnsembleSampler::new(spec, config.seed);
    let nk = config.grid.len();

    let batches: Vec<BatchSums> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sums = BatchSums {
                count: hi - lo,
                r1: vec![0.0; nk],
                r2: vec![0.0; nk],
                qv: vec![0.0; nk],
            };
            for s in lo..hi {
                let state = sampler.state(s);
                let z = state.coeffs();
                for i in 0..nk {
                    let r = r_ops[i].expectation(z).re;
                    let rr = w_ops[i].expectation(z).re;
                    let big_r = nf + r;
                    let d = big_r - r_ref[i];
                    sums.r1[i] += d;
                    sums.r2[i] += d * d;
                    // quantum variance of R per state: <r r> - <r>^2
                    sums.qv[i] += rr - r * r;
                }
            }
            sums
        })
        .collect();

    let mf = m as f64;
    let mut points = Vec::with_capacity(nk);
    for i in 0..nk {
        let s1: f64 = batches.iter().map(|bt| bt.r1[i]).sum();
        let s2: f64 = batches.iter().map(|bt| bt.r2[i]).sum();
        let qv: f64 = batches.iter().map(|bt| bt.qv[i]).sum();

        let mean = r_ref[i] + s1 / mf;
        let ens_cov = (s2 - s1 * s1 / mf) / (mf - 1.0);
        let qvar = qv / mf;

        // batch means for standard errors
        let mean_se = batch_se(batches.iter().map(|bt| (bt.r1[i], bt.count)));
        let qv_se = batch_se(batches.iter().map(|bt| (bt.qv[i], bt.count)));
        let ens_se = batch_se(batches.iter().map(|bt| {
            let c = bt.count as f64;
            let bvar = if bt.count > 1 {
                (bt.r2[i] - bt.r1[i] * bt.r1[i] / c) / (c - 1.0)
            } else {
                0.0
            };
            (bvar * c, bt.count)
        }));

        points.push(KPointStats {
            momentum: config.grid[i],
            mean: Estimate {
                value: mean,
                se: mean_se,
            },
            ensemble_cov: Estimate {
                value: ens_cov,
                se: ens_se,
            },
            quantum_cov_avg: Estimate {
                value: qvar,
                se: qv_se,
            },
        });
    }

    Ok(StatReport {
        particles: spec.particles(),
        dim: spec.dim(),
        provenance: Provenance::MonteCarlo,
        points,
    })
}

/// Standard error of a mean estimated from per-batch (sum, count) pairs.
fn batch_se(batch_sums: impl Iterator<Item = (f64, u64)>) -> f64 {
    let means: Vec<f64> = batch_sums
        .filter(|(_, c)| *c > 0)
        .map(|(s, c)| s / c as f64)
        .collect();
    let nb = means.len();
    if nb < 2 {
        return 0.0;
    }
    let mean = means.iter().sum::<f64>() / nb as f64;
    let var = means.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1) as f64;
    (var / nb as f64).sqrt()
}

/// Closed-form report over a grid (zero standard errors).
pub fn closed_report(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    grid: &[Momentum],
) -> Result<StatReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut points = Vec::with_capacity(grid.len());
    for k in grid {
        kernel.check_momentum(k)?;
        let r = closed_cov_report(spec, kernel, k);
        points.push(KPointStats {
            momentum: *k,
            mean: Estimate::exact(r.mean),
            ensemble_cov: Estimate::exact(r.ensemble_cov),
            quantum_cov_avg: Estimate::exact(r.quantum_cov_avg),
        });
    }
    Ok(StatReport {
        particles: spec.particles(),
        dim: spec.dim(),
        provenance: Provenance::Closed,
        points,
    })
}

/// Exact-trace report over a grid (zero standard errors).
pub fn exact_report(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    grid: &[Momentum],
) -> Result<StatReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut points = Vec::with_capacity(grid.len());
    for k in grid {
        let r = exact_cov_report(spec, kernel, k)?;
        points.push(KPointStats {
            momentum: *k,
            mean: Estimate::exact(r.mean),
            ensemble_cov: Estimate::exact(r.ensemble_cov),
            quantum_cov_avg: Estimate::exact(r.quantum_cov_avg),
        });
    }
    Ok(StatReport {
        particles: spec.particles(),
        dim: spec.dim(),
        provenance: Provenance::Exact,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PlaneWaveModel;

    fn pw_config(bn: u64, dim: u64, samples: usize, seed: u64) -> ExperimentConfig {
        let spec = SubspaceSpec::new(bn, dim).unwrap();
        let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(1).unwrap());
        let grid = vec![Momentum::lattice_1d(0), Momentum::lattice_1d(2)];
        ExperimentConfig::new(spec, kernel, grid, samples, seed).unwrap()
    }

    #[test]
    fn degenerate_window_has_exactly_zero_ensemble_variance() {
        let config = pw_config(10, 1, 500, 3);
        let report = run_ensemble(&config).unwrap();
        for p in &report.points {
            assert_eq!(p.ensemble_cov.value, 0.0);
        }
    }

    #[test]
    fn monte_carlo_mean_tracks_the_exact_trace() {
        let config = pw_config(100, 11, 10_000, 42);
        let report = run_ensemble(&config).unwrap();
        let fringe = &report.points[1];
        let exact = exact_mean_big_r(
            &config.spec,
            &config.kernel,
            &Momentum::lattice_1d(2),
        )
        .unwrap();
        let dev = (fringe.mean.value - exact).abs();
        assert!(dev < 5.0 * fringe.mean.se, "dev {dev}, se {}", fringe.mean.se);
        // at zero momentum R is the constant N^2 for every sector state
        let zero = &report.points[0];
        assert!((zero.mean.value - 10_000.0).abs() < 1e-8);
        assert!(zero.ensemble_cov.value.abs() < 1e-14);
        assert!(zero.quantum_cov_avg.value.abs() < 1e-6);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let config = pw_config(40, 7, 2_000, 9);
        let a = run_ensemble(&config).unwrap();
        let b = run_ensemble(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimator_errors_shrink_like_root_m() {
        // many batches keep the batch-mean error estimate itself quiet
        let small = run_ensemble(&pw_config(40, 7, 4_000, 5).with_batches(128)).unwrap();
        let large = run_ensemble(&pw_config(40, 7, 16_000, 5).with_batches(128)).unwrap();
        let exact = exact_report(
            &SubspaceSpec::new(40, 7).unwrap(),
            &ModeKernel::plane_wave(PlaneWaveModel::new_1d(1).unwrap()),
            &[Momentum::lattice_1d(0), Momentum::lattice_1d(2)],
        )
        .unwrap();
        // the fringe point carries real sampling noise; k = 0 is constant
        let ratio = small.points[1].mean.se / large.points[1].mean.se;
        assert!((1.6..=2.5).contains(&ratio), "ratio {ratio}");
        for i in 0..2 {
            let dev = (large.points[i].mean.value - exact.points[i].mean.value).abs();
            assert!(dev <= 5.0 * large.points[i].mean.se.max(1e-8));
        }
    }

    #[test]
    fn quantum_plus_ensemble_matches_the_mixed_state_variance() {
        // the decomposition identity holds for the matched estimators up to
        // the (M-1) normalization of the variance
        let config = pw_config(60, 9, 6_000, 17);
        let report = run_ensemble(&config).unwrap();
        let spec = config.spec;
        let kernel = config.kernel;
        let k = Momentum::lattice_1d(2);
        let total = crate::wick::exact_total_fluctuation(&spec, &kernel, &k, &k).unwrap();
        let p = &report.points[1];
        let mc_total = p.ensemble_cov.value + p.quantum_cov_avg.value;
        let se = (p.ensemble_cov.se.powi(2) + p.quantum_cov_avg.se.powi(2)).sqrt();
        assert!((mc_total - total).abs() < 5.0 * se, "{mc_total} vs {total}");
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let spec = SubspaceSpec::new(10, 3).unwrap();
        let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(1).unwrap());
        assert!(matches!(
            ExperimentConfig::new(spec, kernel, vec![], 100, 0),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            ExperimentConfig::new(spec, kernel, vec![Momentum::lattice_1d(0)], 1, 0),
            Err(Error::TooFewSamples(1))
        ));
        assert!(matches!(
            ExperimentConfig::new(spec, kernel, vec![Momentum::Real(0.1)], 10, 0),
            Err(Error::MomentumKind)
        ));
    }
}
