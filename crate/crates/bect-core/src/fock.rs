//! Two-mode Fock sector, the sampling subspace, and uniform state sampling.
//!
//! A sector with `N` particles is spanned by the states `|l>` holding
//! `N/2 + l` particles in mode `a` and `N/2 - l` in mode `b`. Initial states
//! are drawn uniformly from the unit sphere of the subspace spanned by
//! `|l| <= (n-1)/2` for odd `n`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Norm tolerance for state vectors: 100x double rounding for dimensions
/// up to 1e4.
pub const NORM_TOL: f64 = 1e-12;

/// The pair (N, n): particle count and sampling-subspace dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SubspaceSpec {
    big_n: u64,
    dim: u64,
}

impl SubspaceSpec {
    /// Validate and build a subspace spec. `N` must be even and >= 2,
    /// `n` odd with 1 <= n <= N+1.
    pub fn new(big_n: u64, dim: u64) -> Result<Self> {
        if big_n % 2 != 0 {
            return Err(Error::OddParticleCount(big_n));
        }
        if big_n < 2 {
            return Err(Error::ParticleCountTooSmall(big_n));
        }
        if dim < 1 {
            return Err(Error::SubspaceDimTooSmall(dim));
        }
        if dim % 2 == 0 {
            return Err(Error::EvenSubspaceDim(dim));
        }
        if dim > big_n + 1 {
            return Err(Error::SubspaceDimTooLarge { n: dim, big_n });
        }
        Ok(SubspaceSpec { big_n, dim })
    }

    /// Total particle count N.
    pub fn particles(&self) -> u64 {
        self.big_n
    }

    /// Subspace dimension n.
    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// Largest admissible |l| in the sampling subspace, (n-1)/2.
    pub fn max_index(&self) -> i64 {
        ((self.dim - 1) / 2) as i64
    }

    /// Admissible indices l = -(n-1)/2 ..= (n-1)/2 in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let m = self.max_index();
        -m..=m
    }

    /// Storage offset of index l within a dense coefficient array.
    pub fn offset_of(&self, ell: i64) -> Result<usize> {
        let m = self.max_index();
        if ell.abs() > m {
            return Err(Error::IndexOutsideSubspace { index: ell, max: m });
        }
        Ok((ell + m) as usize)
    }

    /// Index stored at a given offset.
    pub fn index_at(&self, offset: usize) -> i64 {
        offset as i64 - self.max_index()
    }

    /// True if l lies in the full N-particle sector, |l| <= N/2.
    pub fn in_sector(&self, ell: i64) -> bool {
        ell.unsigned_abs() <= self.big_n / 2
    }

    /// Occupation numbers (N/2 + l, N/2 - l) of `|l>`; l must lie in the
    /// full sector.
    pub fn occupations(&self, ell: i64) -> Result<(u64, u64)> {
        if !self.in_sector(ell) {
            return Err(Error::IndexOutsideSector {
                index: ell,
                half_n: self.big_n / 2,
            });
        }
        let half = (self.big_n / 2) as i64;
        Ok(((half + ell) as u64, (half - ell) as u64))
    }
}

/// A pure state of the two-mode sector, supported on the sampling subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spec: SubspaceSpec,
    coeffs: Vec<Complex64>,
}

impl StateVector {
    /// Build from coefficients ordered by l = -(n-1)/2 ..= (n-1)/2.
    /// Rejects wrong lengths and norms off unity by more than `NORM_TOL`.
    pub fn from_coeffs(spec: SubspaceSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.dim() as usize {
            return Err(Error::CoefficientCount {
                got: coeffs.len(),
                expected: spec.dim() as usize,
            });
        }
        let norm2: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized((norm2 - 1.0).abs()));
        }
        Ok(StateVector { spec, coeffs })
    }

    /// The Fock basis state `|l>` itself.
    pub fn basis_state(spec: SubspaceSpec, ell: i64) -> Result<Self> {
        let idx = spec.offset_of(ell)?;
        let mut coeffs = vec![Complex64::ZERO; spec.dim() as usize];
        coeffs[idx] = Complex64::ONE;
        Ok(StateVector { spec, coeffs })
    }

    pub fn spec(&self) -> SubspaceSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Amplitude z_l; zero outside the subspace.
    pub fn amplitude(&self, ell: i64) -> Complex64 {
        match self.spec.offset_of(ell) {
            Ok(i) => self.coeffs[i],
            Err(_) => Complex64::ZERO,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn expand_seed(master: u64) -> [u8; 32] {
    // splitmix64 expansion of the master seed into a ChaCha key
    let mut state = master;
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

/// Uniform sampler over the subspace unit sphere with per-sample substreams.
///
/// Sample `i` is drawn from a ChaCha8 stream keyed by the master seed with
/// stream id `i`, so serial and parallel draws agree bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleSampler {
    spec: SubspaceSpec,
    key: [u8; 32],
    seed: u64,
}

impl EnsembleSampler {
    pub fn new(spec: SubspaceSpec, seed: u64) -> Self {
        EnsembleSampler {
            spec,
            key: expand_seed(seed),
            seed,
        }
    }

    pub fn spec(&self) -> SubspaceSpec {
        self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw sample `index` of the ensemble.
    pub fn state(&self, index: u64) -> StateVector {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        sample_state(self.spec, &mut rng)
    }

    /// Draw a contiguous block of samples.
    pub fn states(&self, start: u64, count: usize) -> Vec<StateVector> {
        (0..count).map(|i| self.state(start + i as u64)).collect()
    }
}

/// Draw one state uniformly from the unit sphere of the subspace: 2n
/// independent standard normals interpreted as n complex amplitudes,
/// then normalized.
pub fn sample_state<R: Rng + ?Sized>(spec: SubspaceSpec, rng: &mut R) -> StateVector {
    let n = spec.dim() as usize;
    loop {
        let mut coeffs: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let norm2: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            for z in &mut coeffs {
                *z *= inv;
            }
            return StateVector { spec, coeffs };
        }
    }
}

/// Which coefficient moment to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentIndices {
    /// Mean of conj(z_l1) * z_l2.
    Pair(i64, i64),
    /// Mean of conj(z_l1) * conj(z_l2) * z_l3 * z_l4.
    Quartic(i64, i64, i64, i64),
}

impl MomentIndices {
    fn validate(&self, spec: &SubspaceSpec) -> Result<()> {
        let idx: Vec<i64> = match *self {
            MomentIndices::Pair(a, b) => vec![a, b],
            MomentIndices::Quartic(a, b, c, d) => vec![a, b, c, d],
        };
        for l in idx {
            spec.offset_of(l)?;
        }
        Ok(())
    }

    /// Exact ensemble value of the moment under uniform sampling:
    /// pairs give delta_{l1,l2}/n, quartics give
    /// (delta_13 delta_24 + delta_14 delta_23) / (n(n+1)).
    pub fn expected(&self, spec: &SubspaceSpec) -> f64 {
        let n = spec.dim() as f64;
        match *self {
            MomentIndices::Pair(a, b) => {
                if a == b {
                    1.0 / n
                } else {
                    0.0
                }
            }
            MomentIndices::Quartic(a, b, c, d) => {
                let mut v = 0.0;
                if a == c && b == d {
                    v += 1.0;
                }
                if a == d && b == c {
                    v += 1.0;
                }
                v / (n * (n + 1.0))
            }
        }
    }

    fn eval(&self, state: &StateVector) -> Complex64 {
        match *self {
            MomentIndices::Pair(a, b) => state.amplitude(a).conj() * state.amplitude(b),
            MomentIndices::Quartic(a, b, c, d) => {
                state.amplitude(a).conj()
                    * state.amplitude(b).conj()
                    * state.amplitude(c)
                    * state.amplitude(d)
            }
        }
    }
}

/// An empirical moment with a batch-mean standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MomentEstimate {
    pub value: Complex64,
    pub standard_error: f64,
    pub sample_count: usize,
}

impl MomentEstimate {
    /// Absolute deviation from `expected` measured in standard errors.
    pub fn deviation_se(&self, expected: Complex64) -> f64 {
        let d = (self.value - expected).norm();
        if self.standard_error > 0.0 {
            d / self.standard_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Default batch count for batch-mean standard errors.
pub const DEFAULT_BATCHES: usize = 32;

/// Estimate a coefficient moment over a sample set. All samples must share
/// one spec; the standard error comes from `batches` batch means.
pub fn estimate_moments(
    samples: &[StateVector],
    indices: MomentIndices,
    batches: usize,
) -> Result<MomentEstimate> {
    let first = samples.first().ok_or(Error::NoSamples)?;
    let spec = first.spec();
    if samples.iter().any(|s| s.spec() != spec) {
        return Err(Error::MixedSpecs);
    }
    indices.validate(&spec)?;
    let values: Vec<Complex64> = samples.iter().map(|s| indices.eval(s)).collect();
    Ok(batched_mean(&values, batches))
}

fn batched_mean(values: &[Complex64], batches: usize) -> MomentEstimate {
    let m = values.len();
    let b = batches.clamp(1, m.max(1));
    let mut batch_means = Vec::with_capacity(b);
    for i in 0..b {
        let lo = i * m / b;
        let hi = (i + 1) * m / b;
        if hi > lo {
            let s: Complex64 = values[lo..hi].iter().sum();
            batch_means.push(s / (hi - lo) as f64);
        }
    }
    let nb = batch_means.len();
    let mean: Complex64 = batch_means.iter().sum::<Complex64>() / nb as f64;
    let var: f64 = batch_means
        .iter()
        .map(|v| (v - mean).norm_sqr())
        .sum::<f64>()
        / (nb.saturating_sub(1).max(1)) as f64;
    MomentEstimate {
        value: mean,
        standard_error: (var / nb as f64).sqrt(),
        sample_count: m,
    }
}

/// Streamed pair-moment table: empirical means of conj(z_l1) z_l2 for every
/// index pair, with per-entry standard errors. Row-major n x n, batches run
/// in parallel but combine in a fixed order.
pub struct PairMomentTable {
    pub spec: SubspaceSpec,
    pub mean: Vec<Complex64>,
    pub standard_error: Vec<f64>,
    pub sample_count: usize,
}

pub fn pair_moment_table(
    sampler: &EnsembleSampler,
    samples: usize,
    batches: usize,
) -> Result<PairMomentTable> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let spec = sampler.spec();
    let n = spec.dim() as usize;
    let b = batches.clamp(2, samples);
    let ranges: Vec<(u64, u64)> = (0..b)
        .map(|i| ((i * samples / b) as u64, ((i + 1) * samples / b) as u64))
        .collect();

    let batch_sums: Vec<(Vec<Complex64>, u64)> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![Complex64::ZERO; n * n];
            for s in lo..hi {
                let state = sampler.state(s);
                let z = state.coeffs();
                for i in 0..n {
                    let zi = z[i].conj();
                    let row = &mut acc[i * n..(i + 1) * n];
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot += zi * z[j];
                    }
                }
            }
            (acc, hi - lo)
        })
        .collect();

    let mut batch_means: Vec<Vec<Complex64>> = Vec::with_capacity(b);
    for (sum, count) in &batch_sums {
        if *count > 0 {
            batch_means.push(sum.iter().map(|v| v / *count as f64).collect());
        }
    }
    let nb = batch_means.len();
    let mut mean = vec![Complex64::ZERO; n * n];
    for bm in &batch_means {
        for (m, v) in mean.iter_mut().zip(bm) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= nb as f64;
    }
    let mut se = vec![0.0; n * n];
    for bm in &batch_means {
        for ((s, v), m) in se.iter_mut().zip(bm).zip(&mean) {
            *s += (v - m).norm_sqr();
        }
    }
    for s in &mut se {
        *s = (*s / ((nb - 1).max(1) as f64) / nb as f64).sqrt();
    }
    Ok(PairMomentTable {
        spec,
        mean,
        standard_error: se,
        sample_count: samples,
    })
}

/// Streamed estimates for a list of quartic moments.
pub fn quartic_moments(
    sampler: &EnsembleSampler,
    tuples: &[(i64, i64, i64, i64)],
    samples: usize,
    batches: usize,
) -> Result<Vec<MomentEstimate>> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples));
    }
    let spec = sampler.spec();
    let idx: Vec<MomentIndices> = tuples
        .iter()
        .map(|&(a, b, c, d)| MomentIndices::Quartic(a, b, c, d))
        .collect();
    for m in &idx {
        m.validate(&spec)?;
    }
    let b = batches.clamp(2, samples);
    let ranges: Vec<(u64, u64)> = (0..b)
        .map(|i| ((i * samples / b) as u64, ((i + 1) * samples / b) as u64))
        .collect();
    let batch_sums: Vec<(Vec<Complex64>, u64)> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = vec![Complex64::ZERO; idx.len()];
            for s in lo..hi {
                let state = sampler.state(s);
                for (slot, m) in acc.iter_mut().zip(&idx) {
                    *slot += m.eval(&state);
                }
            }
            (acc, hi - lo)
        })
        .collect();

    let mut out = Vec::with_capacity(idx.len());
    for j in 0..idx.len() {
        let means: Vec<Complex64> = batch_sums
            .iter()
            .filter(|(_, c)| *c > 0)
            .map(|(sum, c)| sum[j] / *c as f64)
            .collect();
        let nb = means.len();
        let mean = means.iter().sum::<Complex64>() / nb as f64;
        let var = means.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>()
            / ((nb - 1).max(1)) as f64;
        out.push(MomentEstimate {
            value: mean,
            standard_error: (var / nb as f64).sqrt(),
            sample_count: samples,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n_particles: u64, dim: u64) -> SubspaceSpec {
        SubspaceSpec::new(n_particles, dim).unwrap()
    }

    #[test]
    fn subspace_indices_follow_the_window() {
        let s = spec(4, 3);
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![-1, 0, 1]);
        let full = spec(4, 5);
        assert_eq!(full.indices().collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn subspace_validation_has_distinct_diagnostics() {
        let e = SubspaceSpec::new(5, 3).unwrap_err();
        assert!(e.to_string().contains("N must be even"));
        assert!(matches!(
            SubspaceSpec::new(4, 2),
            Err(Error::EvenSubspaceDim(2))
        ));
        assert!(matches!(
            SubspaceSpec::new(4, 0),
            Err(Error::SubspaceDimTooSmall(0))
        ));
        assert!(matches!(
            SubspaceSpec::new(4, 7),
            Err(Error::SubspaceDimTooLarge { n: 7, big_n: 4 })
        ));
    }

    #[test]
    fn occupations_split_the_sector() {
        let s = spec(4, 3);
        assert_eq!(s.occupations(0).unwrap(), (2, 2));
        assert_eq!(s.occupations(1).unwrap(), (3, 1));
        assert_eq!(s.occupations(-2).unwrap(), (0, 4));
        assert!(s.occupations(3).is_err());
    }

    #[test]
    fn one_dimensional_subspace_is_a_pure_phase() {
        let s = spec(4, 1);
        let sampler = EnsembleSampler::new(s, 7);
        for i in 0..4 {
            let st = sampler.state(i);
            assert!((st.amplitude(0).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_index() {
        let s = spec(100, 11);
        let sampler = EnsembleSampler::new(s, 42);
        let a = sampler.state(5);
        let b = sampler.state(5);
        assert_eq!(a.coeffs(), b.coeffs());
        let other = EnsembleSampler::new(s, 43).state(5);
        assert_ne!(a.coeffs(), other.coeffs());
    }

    #[test]
    fn parallel_blocks_match_serial_draws() {
        let s = spec(10, 5);
        let sampler = EnsembleSampler::new(s, 9);
        let serial: Vec<_> = (0..16).map(|i| sampler.state(i)).collect();
        let block = sampler.states(0, 16);
        for (a, b) in serial.iter().zip(&block) {
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn sampled_states_are_normalized() {
        let s = spec(100, 11);
        let sampler = EnsembleSampler::new(s, 1);
        for i in 0..100 {
            assert!((sampler.state(i).norm_sqr() - 1.0).abs() <= NORM_TOL);
        }
    }

    #[test]
    fn mean_square_amplitude_approaches_one_over_n() {
        let s = spec(100, 11);
        let sampler = EnsembleSampler::new(s, 42);
        let samples = sampler.states(0, 20_000);
        let est = estimate_moments(&samples, MomentIndices::Pair(0, 0), DEFAULT_BATCHES).unwrap();
        let dev = est.deviation_se(Complex64::new(1.0 / 11.0, 0.0));
        assert!(dev < 5.0, "deviation {dev} SE");
    }

    #[test]
    fn off_diagonal_pair_moment_vanishes() {
        let s = spec(100, 11);
        let sampler = EnsembleSampler::new(s, 3);
        let samples = sampler.states(0, 20_000);
        let est = estimate_moments(&samples, MomentIndices::Pair(0, 1), DEFAULT_BATCHES).unwrap();
        assert!(est.deviation_se(Complex64::ZERO) < 5.0);
    }

    #[test]
    fn quartic_moment_matches_the_inverse_dimension_law() {
        let s = spec(100, 11);
        let sampler = EnsembleSampler::new(s, 11);
        let samples = sampler.states(0, 40_000);
        let est =
            estimate_moments(&samples, MomentIndices::Quartic(0, 1, 0, 1), DEFAULT_BATCHES)
                .unwrap();
        let expected = Complex64::new(1.0 / 132.0, 0.0);
        assert!(est.deviation_se(expected) < 5.0);
    }

    #[test]
    fn single_basis_state_moment_is_exact() {
        let s = spec(4, 1);
        let sampler = EnsembleSampler::new(s, 0);
        let samples = sampler.states(0, 64);
        let est = estimate_moments(&samples, MomentIndices::Pair(0, 0), 8).unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-12);
        assert!(est.value.im.abs() < 1e-15);
    }

    #[test]
    fn mixed_specs_are_rejected() {
        let a = EnsembleSampler::new(spec(4, 3), 0).state(0);
        let b = EnsembleSampler::new(spec(6, 3), 0).state(0);
        let err = estimate_moments(&[a, b], MomentIndices::Pair(0, 0), 2).unwrap_err();
        assert_eq!(err, Error::MixedSpecs);
    }

    #[test]
    fn standard_error_shrinks_like_root_m() {
        let s = spec(20, 5);
        let sampler = EnsembleSampler::new(s, 5);
        let small = sampler.states(0, 4_000);
        let large = sampler.states(0, 16_000);
        let se_small = estimate_moments(&small, MomentIndices::Pair(0, 0), 32)
            .unwrap()
            .standard_error;
        let se_large = estimate_moments(&large, MomentIndices::Pair(0, 0), 32)
            .unwrap()
            .standard_error;
        let ratio = se_small / se_large;
        assert!((1.4..=2.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn moments_are_invariant_under_a_fixed_subspace_rotation() {
        let s = spec(20, 5);
        let n = 5;
        // fixed unitary from Gram-Schmidt on a seeded gaussian matrix
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    })
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..i {
                let proj: Complex64 = (0..n).map(|k| cols[j][k].conj() * cols[i][k]).sum();
                for k in 0..n {
                    let d = proj * cols[j][k];
                    cols[i][k] -= d;
                }
            }
            let nrm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for k in 0..n {
                cols[i][k] /= nrm;
            }
        }
        let rotate = |st: &StateVector| {
            let z = st.coeffs();
            let w: Vec<Complex64> = (0..n)
                .map(|i| (0..n).map(|j| cols[j][i] * z[j]).sum())
                .collect();
            let norm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            let w = w.into_iter().map(|z| z / norm2.sqrt()).collect();
            StateVector::from_coeffs(s, w).unwrap()
        };

        let sampler = EnsembleSampler::new(s, 77);
        let samples = sampler.states(0, 20_000);
        let rotated: Vec<StateVector> = samples.iter().map(rotate).collect();
        for idx in [
            MomentIndices::Pair(0, 0),
            MomentIndices::Pair(1, -1),
            MomentIndices::Quartic(0, 1, 0, 1),
        ] {
            let a = estimate_moments(&samples, idx, 32).unwrap();
            let b = estimate_moments(&rotated, idx, 32).unwrap();
            let se = (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
            assert!(
                (a.value - b.value).norm() < 5.0 * se,
                "{idx:?}: {} vs {}",
                a.value,
                b.value
            );
        }
    }

    #[test]
    fn pair_table_matches_direct_estimates() {
        let s = spec(10, 3);
        let sampler = EnsembleSampler::new(s, 2);
        let table = pair_moment_table(&sampler, 5_000, 16).unwrap();
        let samples = sampler.states(0, 5_000);
        let direct = estimate_moments(&samples, MomentIndices::Pair(-1, 1), 16).unwrap();
        let i = s.offset_of(-1).unwrap();
        let j = s.offset_of(1).unwrap();
        let got = table.mean[i * 3 + j];
        assert!((got - direct.value).norm() < 1e-12);
    }
}
