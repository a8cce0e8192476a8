//! Closed forms specific to the expanding-Gaussian model: the large-time
//! three-peak mean, the variance coefficients C30, C12, C04, C03, and the
//! real-space average density.

use crate::analytics::covariance::{CovReport, Provenance};
use crate::analytics::{mean_big_r_closed, quantum_cov_closed};
use crate::fock::SubspaceSpec;
use crate::models::{GaussianModel, Mode, ModeKernel, Momentum};

/// `exp(a) * sinh^2(u)` rearranged as `(e^(a+2u) - 2 e^a + e^(a-2u)) / 4`
/// so that huge `sinh` arguments never overflow (all combined exponents
/// that occur here are nonpositive).
fn exp_sinh2(a: f64, u: f64) -> f64 {
    0.25 * ((a + 2.0 * u).exp() - 2.0 * a.exp() + (a - 2.0 * u).exp())
}

/// Side-peak envelope `P(q) = e^(-t^2 (q+2k0)^2 / 2) + e^(-t^2 (q-2k0)^2 / 2)`.
pub fn side_peak_envelope(model: &GaussianModel, q: f64) -> f64 {
    let t2 = model.t() * model.t();
    let k0 = model.k0_of_t();
    (-0.5 * t2 * (q + 2.0 * k0) * (q + 2.0 * k0)).exp()
        + (-0.5 * t2 * (q - 2.0 * k0) * (q - 2.0 * k0)).exp()
}

/// Large-time coefficient of N^3 in the averaged quantum covariance.
pub fn c30(model: &GaussianModel, k: f64, k2: f64) -> f64 {
    let t2 = model.t() * model.t();
    let k0 = model.k0_of_t();
    let (kp, km) = (k + 2.0 * k0, k - 2.0 * k0);
    let (kp2, km2) = (k2 + 2.0 * k0, k2 - 2.0 * k0);

    // 8 e^(-t^2(k^2+k2^2)/2) sinh^2(t^2 k k2 / 4), expanded stably
    let term1 = 8.0 * exp_sinh2(-0.5 * t2 * (k * k + k2 * k2), 0.25 * t2 * k * k2);

    let term2 = -0.25 * side_peak_envelope(model, k) * side_peak_envelope(model, k2);

    let term3 = 2.0
        * (exp_sinh2(-0.5 * t2 * (k * k + kp2 * kp2), 0.25 * t2 * k * kp2)
            + exp_sinh2(-0.5 * t2 * (k * k + km2 * km2), 0.25 * t2 * k * km2));
    let term4 = 2.0
        * (exp_sinh2(-0.5 * t2 * (k2 * k2 + kp * kp), 0.25 * t2 * k2 * kp)
            + exp_sinh2(-0.5 * t2 * (k2 * k2 + km * km), 0.25 * t2 * k2 * km));

    let term5 = 0.5
        * ((-0.5 * t2 * ((k - k2) * (k - k2) + kp * kp2)).exp()
            + (-0.5 * t2 * ((k - k2) * (k - k2) + km * km2)).exp());
    let term6 = 0.5
        * ((-0.5 * t2 * ((k + k2) * (k + k2) - km * kp2)).exp()
            + (-0.5 * t2 * ((k + k2) * (k + k2) - kp * km2)).exp());

    term1 + term2 + term3 + term4 + term5 + term6
}

/// Large-time coefficient of N n^2:
/// `(1/3) (8 e^(-t^2(k^2+k2^2)/2) sinh^2(t^2 k k2/4) - C30)`.
pub fn c12(model: &GaussianModel, k: f64, k2: f64) -> f64 {
    let t2 = model.t() * model.t();
    let term1 = 8.0 * exp_sinh2(-0.5 * t2 * (k * k + k2 * k2), 0.25 * t2 * k * k2);
    (term1 - c30(model, k, k2)) / 3.0
}

/// Large-time coefficient of n^4, `P(k) P(k2) / 180`.
pub fn c04(model: &GaussianModel, k: f64, k2: f64) -> f64 {
    side_peak_envelope(model, k) * side_peak_envelope(model, k2) / 180.0
}

/// Large-time coefficient of n^3, the negative of [`c04`].
pub fn c03(model: &GaussianModel, k: f64, k2: f64) -> f64 {
    -c04(model, k, k2)
}

/// Large-N mean of `R(k)` divided by N^2, with the exact kernels:
/// `(|F_aa + F_bb|^2 + |F_ab|^2 + |F_ba|^2) / 4`.
pub fn mean_ratio_exact_kernel(model: &GaussianModel, k: f64) -> f64 {
    let kernel = ModeKernel::gaussian(*model);
    let q = Momentum::Real(k);
    let i = kernel.eval(Mode::A, Mode::A, &q) + kernel.eval(Mode::B, Mode::B, &q);
    let fab = kernel.eval(Mode::A, Mode::B, &q);
    let fba = kernel.eval(Mode::B, Mode::A, &q);
    0.25 * (i.norm_sqr() + fab.norm_sqr() + fba.norm_sqr())
}

/// Large-time limit of the mean ratio: a unit central peak of width 1/t
/// and side peaks of height 1/4 at `+-2 k0(t)`.
pub fn mean_ratio_large_time(model: &GaussianModel, k: f64) -> f64 {
    let t2 = model.t() * model.t();
    (-0.5 * t2 * k * k).exp() + 0.25 * side_peak_envelope(model, k)
}

/// Large-time ensemble covariance, `n^3/180 P(k) P(k2)`.
pub fn ensemble_cov_large_time(dim: u64, model: &GaussianModel, k: f64, k2: f64) -> f64 {
    (dim as f64).powi(3) / 180.0 * side_peak_envelope(model, k) * side_peak_envelope(model, k2)
}

/// Large-time averaged quantum covariance,
/// `C30 N^3 + C12 N n^2 + C04 n^4 + C03 n^3`.
pub fn quantum_cov_large_time(
    spec: &SubspaceSpec,
    model: &GaussianModel,
    k: f64,
    k2: f64,
) -> f64 {
    let nf = spec.particles() as f64;
    let n = spec.dim() as f64;
    c30(model, k, k2) * nf.powi(3)
        + c12(model, k, k2) * nf * n * n
        + c04(model, k, k2) * n.powi(4)
        + c03(model, k, k2) * n.powi(3)
}

/// Which closed evaluation path to use; never switched silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianPath {
    /// Displayed formulas evaluated with the exact kernels.
    ExactKernel,
    /// Displayed large-time asymptotics (t >> 1 and t >> alpha).
    LargeTime,
}

/// Default momentum grid: `[-4 k0 - 8/t, 4 k0 + 8/t]` with `points`
/// samples, at least eight points per peak width.
pub fn default_grid(model: &GaussianModel, points: usize) -> Vec<f64> {
    let half = 4.0 * model.k0_of_t() + 8.0 / model.t().max(1.0);
    let m = points.max(2);
    (0..m)
        .map(|i| -half + 2.0 * half * i as f64 / (m - 1) as f64)
        .collect()
}

/// Closed-form reports on a grid (variance slice k2 = k) along the chosen
/// evaluation path.
pub fn gaussian_closed_set(
    spec: &SubspaceSpec,
    model: &GaussianModel,
    grid: &[f64],
    path: GaussianPath,
) -> Vec<CovReport> {
    let kernel = ModeKernel::gaussian(*model);
    let nf = spec.particles() as f64;
    grid.iter()
        .map(|&k| {
            let coeffs = [
                c30(model, k, k),
                c12(model, k, k),
                c04(model, k, k),
                c03(model, k, k),
            ];
            match path {
                GaussianPath::ExactKernel => {
                    let q = Momentum::Real(k);
                    let parts =
                        crate::analytics::covariance::ensemble_cov_closed(spec, &kernel, &q, &q);
                    CovReport {
                        mean: mean_big_r_closed(spec, &kernel, &q),
                        ensemble_cov: parts.total(),
                        quantum_cov_avg: quantum_cov_closed(spec, &kernel, &q, &q),
                        ensemble_parts: Some(parts),
                        c_coefficients: Some(coeffs),
                        provenance: Provenance::Closed,
                    }
                }
                GaussianPath::LargeTime => CovReport {
                    mean: nf * nf * mean_ratio_large_time(model, k),
                    ensemble_cov: ensemble_cov_large_time(spec.dim(), model, k, k),
                    quantum_cov_avg: quantum_cov_large_time(spec, model, k, k),
                    ensemble_parts: None,
                    c_coefficients: Some(coeffs),
                    provenance: Provenance::Closed,
                },
            }
        })
        .collect()
}

/// Ensemble-averaged real-space density on a position grid:
/// `(N/2) (rho_a + rho_b)`. Plane-wave modes are flat, so the density is
/// the constant N.
pub fn average_density(kernel: &ModeKernel, positions: &[f64], particles: u64) -> Vec<f64> {
    let nf = particles as f64;
    match kernel {
        ModeKernel::PlaneWave(_) => vec![nf; positions.len()],
        ModeKernel::Gaussian(m) => positions
            .iter()
            .map(|&x| 0.5 * nf * (m.mode_density(Mode::A, x) + m.mode_density(Mode::B, x)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GaussianModel {
        GaussianModel::new(5.0, 50.0).unwrap()
    }

    #[test]
    fn c_coefficients_at_the_fringe_match_their_anchors() {
        let m = model();
        let k = 2.0 * m.k0_of_t();
        // C30 -> 1/4, C12 -> -1/12, C04 -> 1/180 up to exponentially small tails
        assert!((c30(&m, k, k) - 0.25).abs() < 1e-6);
        assert!((c12(&m, k, k) + 1.0 / 12.0).abs() < 1e-6);
        assert!((c04(&m, k, k) - 1.0 / 180.0).abs() < 1e-7);
        assert!((c04(&m, k, k) - 0.005556).abs() < 1e-6);
        assert_eq!(c03(&m, k, k), -c04(&m, k, k));
    }

    #[test]
    fn c12_satisfies_its_defining_identity_pointwise() {
        let m = model();
        let grid = default_grid(&m, 64);
        for &k in &grid {
            for &k2 in grid.iter().step_by(7) {
                let t2 = m.t() * m.t();
                let lhs = 3.0 * c12(&m, k, k2) + c30(&m, k, k2);
                let direct = 8.0
                    * (-0.5 * t2 * (k * k + k2 * k2)).exp()
                    * (0.25 * t2 * k * k2).sinh().powi(2);
                // compare against the naive sinh form where it is finite
                if direct.is_finite() {
                    assert!(
                        (lhs - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                        "k={k} k2={k2}: {lhs} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn c30_is_nonnegative_on_the_variance_diagonal() {
        let m = model();
        for &k in &default_grid(&m, 512) {
            assert!(c30(&m, k, k) >= -1e-12, "k={k}");
        }
    }

    #[test]
    fn mean_ratio_has_the_three_peak_shape() {
        let m = model();
        let center = mean_ratio_exact_kernel(&m, 0.0);
        assert!((center - 1.0).abs() < 1e-3);
        let k = 2.0 * m.k0_of_t();
        let side = mean_ratio_exact_kernel(&m, k);
        let expect = 0.25 * (-2.0 * 25.0 / 2501.0f64).exp();
        assert!((side - expect).abs() < 1e-9);
        assert!((side - 0.2450).abs() < 1e-3);
        // side over center within two percent of one fourth
        assert!(((side / center) - 0.25).abs() / 0.25 < 0.02);
        // large-time variant puts the side peaks at exactly one fourth
        assert!((mean_ratio_large_time(&m, k) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn average_density_is_flat_for_plane_waves() {
        let kernel = ModeKernel::plane_wave(crate::models::PlaneWaveModel::new_1d(1).unwrap());
        let rho = average_density(&kernel, &[0.0, 0.3, 1.7], 100);
        assert_eq!(rho, vec![100.0, 100.0, 100.0]);
    }

    #[test]
    fn average_density_integrates_to_the_particle_count() {
        let m = GaussianModel::new(5.0, 0.0).unwrap();
        let kernel = ModeKernel::gaussian(m);
        let (lo, hi, steps) = (-40.0, 40.0, 80_000);
        let h = (hi - lo) / steps as f64;
        let grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * h).collect();
        let rho = average_density(&kernel, &grid, 100);
        let mut integral = 0.0;
        for (i, v) in rho.iter().enumerate() {
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            integral += w * v * h;
        }
        assert!((integral - 100.0).abs() < 1e-6);
        // two separated unit-width bumps of mass N/2: peak near N/(2 sqrt(pi))
        let at_peak = average_density(&kernel, &[5.0], 100)[0];
        assert!((at_peak - 50.0 / std::f64::consts::PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn spread_density_at_the_origin() {
        let m = model();
        let kernel = ModeKernel::gaussian(m);
        let v = average_density(&kernel, &[0.0], 1)[0];
        let expect = (1.0 / (std::f64::consts::PI * 2501.0).sqrt()) * (-25.0 / 2501.0f64).exp();
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 0.01117).abs() < 1e-5);
    }

    #[test]
    fn default_grid_covers_the_side_peaks() {
        let m = model();
        let grid = default_grid(&m, 2048);
        assert_eq!(grid.len(), 2048);
        let k = 2.0 * m.k0_of_t();
        assert!(grid[0] < -k && *grid.last().unwrap() > k);
        let step = grid[1] - grid[0];
        assert!(step < 1.0 / m.t() / 8.0);
    }
}
