//! Single-run fringe reconstruction.
//!
//! A single run measures `R` at the fringe momentum, which fixes the
//! modulus of the density's oscillating Fourier component through
//! `|rho_tilde|^2 = R` together with `rho_tilde(0) = N` and reality. The
//! fringe offset is not fixed by `R`; it is redrawn uniformly per run, so
//! patterns average to a flat density.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::SectorOp;
use crate::error::Result;
use crate::fock::{EnsembleSampler, StateVector, SubspaceSpec};
use crate::models::ModeKernel;
use crate::wick::build_r_poly;

/// One reconstructed interference pattern,
/// `rho(x) = N + 2 A cos(2 k0 x + 2 phi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRecord {
    /// Fringe wavevector of the density, `2 k0`.
    pub fringe_wavevector: f64,
    /// Per-run offset in [0, 2 pi).
    pub phase: f64,
    /// Fringe amplitude A, at most N/2.
    pub amplitude: f64,
    pub positions: Vec<f64>,
    pub density: Vec<f64>,
}

impl PatternRecord {
    /// Build the cosine-squared-shaped pattern from an amplitude and offset.
    pub fn synthesize(
        particles: u64,
        amplitude: f64,
        k0: f64,
        phase: f64,
        positions: &[f64],
    ) -> Self {
        let nf = particles as f64;
        let a = amplitude.clamp(0.0, 0.5 * nf);
        let density = positions
            .iter()
            .map(|&x| nf + 2.0 * a * (2.0 * k0 * x + 2.0 * phase).cos())
            .collect();
        PatternRecord {
            fringe_wavevector: 2.0 * k0,
            phase,
            amplitude: a,
            positions: positions.to_vec(),
            density,
        }
    }

    /// Spatial period of the fringes, `pi / k0`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.fringe_wavevector
    }
}

/// Reconstruct one run's pattern from a sampled state.
///
/// The fringe power is the state's expectation of the normal-ordered part
/// of `R` at the kernel's fringe momentum (clamped at zero); its square
/// root is the fringe amplitude. `k0` sets the spatial scale of the
/// emitted pattern and the offset is drawn uniformly from the supplied
/// stream.
pub fn single_run_pattern<R: Rng + ?Sized>(
    state: &StateVector,
    kernel: &ModeKernel,
    k0: f64,
    positions: &[f64],
    rng: &mut R,
) -> Result<PatternRecord> {
    let fringe = kernel.fringe_momentum();
    let poly = build_r_poly(kernel, &fringe)?;
    let op = SectorOp::new(&poly, &state.spec())?;
    let power = op.expectation(state.coeffs()).re.max(0.0);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    Ok(PatternRecord::synthesize(
        state.spec().particles(),
        power.sqrt(),
        k0,
        phase,
        positions,
    ))
}

/// Mean density over `runs` reconstructed patterns with per-position
/// standard errors. Run `i` uses sample `i` of the ensemble and a phase
/// drawn from substream `i` of a second generator, so results do not
/// depend on thread count.
pub fn average_pattern(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    k0: f64,
    positions: &[f64],
    runs: usize,
    seed: u64,
    batches: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let fringe = kernel.fringe_momentum();
    let poly = build_r_poly(kernel, &fringe)?;
    let op = SectorOp::new(&poly, spec)?;
    let sampler = EnsembleSampler::new(*spec, seed);
    let phase_sampler = EnsembleSampler::new(*spec, seed ^ 0x70617474_65726e73);
    let nf = spec.particles() as f64;

    let b = batches.clamp(2, runs.max(2));
    let ranges: Vec<(u64, u64)> = (0..b)
        .map(|i| ((i * runs / b) as u64, ((i + 1) * runs / b) as u64))
        .collect();
    let np = positions.len();

    let batch_sums: Vec<(Vec<f64>, Vec<f64>, u64)> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut sum = vec![0.0; np];
            let mut sum2 = vec![0.0; np];
            for run in lo..hi {
                let state = sampler.state(run);
                let power = op.expectation(state.coeffs()).re.max(0.0);
                let a = power.sqrt().clamp(0.0, 0.5 * nf);
                // cheap uniform phase from the substream machinery
                let phase_state = phase_sampler.state(run);
                let z = phase_state.coeffs()[0];
                let phase = z.im.atan2(z.re);
                for (j, &x) in positions.iter().enumerate() {
                    let v = nf + 2.0 * a * (2.0 * k0 * x + 2.0 * phase).cos();
                    sum[j] += v;
                    sum2[j] += v * v;
                }
            }
            (sum, sum2, hi - lo)
        })
        .collect();

    let mut mean = vec![0.0; np];
    let total: u64 = batch_sums.iter().map(|(_, _, c)| *c).sum();
    for (sum, _, _) in &batch_sums {
        for (m, s) in mean.iter_mut().zip(sum) {
            *m += s;
        }
    }
    for m in &mut mean {
        *m /= total as f64;
    }
    // batch-mean standard errors per position
    let mut se = vec![0.0; np];
    for j in 0..np {
        let means: Vec<f64> = batch_sums
            .iter()
            .filter(|(_, _, c)| *c > 0)
            .map(|(sum, _, c)| sum[j] / *c as f64)
            .collect();
        let nb = means.len();
        let mb = means.iter().sum::<f64>() / nb as f64;
        let var = means.iter().map(|v| (v - mb) * (v - mb)).sum::<f64>()
            / ((nb - 1).max(1)) as f64;
        se[j] = (var / nb as f64).sqrt();
    }
    Ok((mean, se))
}
