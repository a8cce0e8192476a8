//! Closed-form statistics of the density correlation observable: window
//! moment sums, the mean of `R`, covariance assemblies, and the model
//! specializations.

pub mod appendix;
pub mod covariance;
pub mod gaussian;
pub mod plane_wave;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::fock::SubspaceSpec;
use crate::models::{Mode, ModeKernel, Momentum};

pub use covariance::{ensemble_cov_closed, quantum_cov_closed, CovReport, EnsembleCovParts};
pub use gaussian::{average_density, gaussian_closed_set};

/// Exact rational used for the moment sums (S40 reaches N^4/16, far past
/// what repeated f64 summation keeps exact).
pub type Rat = Ratio<i128>;

fn rat(n: i128, d: i128) -> Rat {
    Ratio::new(n, d)
}

/// Convert to f64 as a single correctly rounded division.
pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Evaluation mode of a [`SumsRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SumsMode {
    /// Direct summation of the diagonal occupation polynomials over the
    /// window; exact for every (N, n).
    Exact,
    /// The displayed closed forms; S20 and S11 are exact, the quartic and
    /// cubic sums drop terms of order N^2.
    Closed,
}

/// The seven window-averaged occupation moment sums.
///
/// With occupations `N_a = N/2 + l` and `N_b = N/2 - l` averaged over the
/// window, these are S20 = <N_a(N_a-1)>, S11 = <N_a N_b>,
/// S40 = <N_a(N_a-1)(N_a-2)(N_a-3)>, S31 = <N_b N_a(N_a-1)(N_a-2)>,
/// S22 = <N_a N_b (N_a-1)(N_b-1)>, S30 = <N_a(N_a-1)(N_a-2)>,
/// S21 = <N_b N_a(N_a-1)>. The symmetric window makes the a/b choice
/// immaterial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumsRecord {
    pub s20: Rat,
    pub s11: Rat,
    pub s40: Rat,
    pub s31: Rat,
    pub s22: Rat,
    pub s30: Rat,
    pub s21: Rat,
    pub mode: SumsMode,
}

impl SumsRecord {
    pub fn values_f64(&self) -> [f64; 7] {
        [
            rat_to_f64(self.s20),
            rat_to_f64(self.s11),
            rat_to_f64(self.s40),
            rat_to_f64(self.s31),
            rat_to_f64(self.s22),
            rat_to_f64(self.s30),
            rat_to_f64(self.s21),
        ]
    }

    pub const NAMES: [&'static str; 7] = ["S20", "S11", "S40", "S31", "S22", "S30", "S21"];
}

/// Direct summation of the diagonal polynomials over the window.
pub fn s_sums_exact(spec: &SubspaceSpec) -> SumsRecord {
    let half = (spec.particles() / 2) as i128;
    let n = spec.dim() as i128;
    let (mut s20, mut s11, mut s40, mut s31, mut s22, mut s30, mut s21) =
        (0i128, 0i128, 0i128, 0i128, 0i128, 0i128, 0i128);
    for ell in spec.indices() {
        let na = half + ell as i128;
        let nb = half - ell as i128;
        s20 += na * (na - 1);
        s11 += na * nb;
        s40 += na * (na - 1) * (na - 2) * (na - 3);
        s31 += nb * na * (na - 1) * (na - 2);
        s22 += na * nb * (na - 1) * (nb - 1);
        s30 += na * (na - 1) * (na - 2);
        s21 += nb * na * (na - 1);
    }
    SumsRecord {
        s20: rat(s20, n),
        s11: rat(s11, n),
        s40: rat(s40, n),
        s31: rat(s31, n),
        s22: rat(s22, n),
        s30: rat(s30, n),
        s21: rat(s21, n),
        mode: SumsMode::Exact,
    }
}

/// The displayed closed forms. S20 and S11 are exact; the others carry an
/// order-N^2 remainder.
pub fn s_sums_closed(spec: &SubspaceSpec) -> SumsRecord {
    let nn = spec.particles() as i128;
    let sd = spec.dim() as i128;
    let n2 = nn * nn;
    let n3 = n2 * nn;
    let n4 = n3 * nn;
    let d2 = sd * sd;
    let d4 = d2 * d2;
    SumsRecord {
        s20: rat(n2 - 2 * nn, 4) + rat(d2 - 1, 12),
        s11: rat(n2, 4) - rat(d2 - 1, 12),
        s40: rat(n4 - 12 * n3, 16) + rat(d4, 80) + rat((n2 - 6 * nn) * d2, 8),
        s31: rat(n4 - 6 * n3, 16) - rat(d4, 80) + rat(nn * d2, 8),
        s22: rat(n4 - 4 * n3, 16) + rat(d4, 80) - rat((n2 - 2 * nn) * d2, 24),
        s30: rat(n3 + nn * d2, 8),
        s21: rat(3 * n3 - nn * d2, 24),
        mode: SumsMode::Closed,
    }
}

/// Kernel combinations entering the mean and the diagonal covariance.
#[derive(Debug, Clone, Copy)]
pub struct KernelWeights {
    /// |F_aa(k)|^2 + |F_bb(k)|^2, the same-mode pair weight.
    pub density_sq_sum: f64,
    /// 2 Re(conj(F_aa) F_bb)(k) + |F_ab(k)|^2 + |F_ba(k)|^2, the
    /// cross-mode weight.
    pub interference: f64,
    /// |F_aa(k)|^2 - |F_bb(k)|^2, the density imbalance.
    pub density_diff: f64,
}

pub fn kernel_weights(kernel: &ModeKernel, k: &Momentum) -> KernelWeights {
    let faa = kernel.eval(Mode::A, Mode::A, k);
    let fbb = kernel.eval(Mode::B, Mode::B, k);
    let fab = kernel.eval(Mode::A, Mode::B, k);
    let fba = kernel.eval(Mode::B, Mode::A, k);
    KernelWeights {
        density_sq_sum: faa.norm_sqr() + fbb.norm_sqr(),
        interference: 2.0 * (faa.conj() * fbb).re + fab.norm_sqr() + fba.norm_sqr(),
        density_diff: faa.norm_sqr() - fbb.norm_sqr(),
    }
}

/// Closed-form window mean of `r(k)`: pair weight times S20 plus
/// interference weight times S11 (both exact rationals).
pub fn mean_r_closed(spec: &SubspaceSpec, kernel: &ModeKernel, k: &Momentum) -> f64 {
    let w = kernel_weights(kernel, k);
    let sums = s_sums_closed(spec);
    w.density_sq_sum * rat_to_f64(sums.s20) + w.interference * rat_to_f64(sums.s11)
}

/// Closed-form ensemble mean of `R(k) = r(k) + N`.
pub fn mean_big_r_closed(spec: &SubspaceSpec, kernel: &ModeKernel, k: &Momentum) -> f64 {
    spec.particles() as f64 + mean_r_closed(spec, kernel, k)
}

/// Complex-valued helper used by the covariance assembly tests.
pub fn complex_is_real(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol * z.re.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::PlaneWaveModel;
    use crate::wick::exact_mean_big_r;

    fn spec(n_particles: u64, dim: u64) -> SubspaceSpec {
        SubspaceSpec::new(n_particles, dim).unwrap()
    }

    #[test]
    fn exact_sums_match_the_three_level_hand_table() {
        let s = s_sums_exact(&spec(4, 3));
        assert_eq!(s.s20, rat(8, 3));
        assert_eq!(s.s11, rat(10, 3));
        assert_eq!(s.s40, rat(0, 1));
        assert_eq!(s.s31, rat(2, 1));
        assert_eq!(s.s22, rat(4, 3));
        assert_eq!(s.s30, rat(2, 1));
        assert_eq!(s.s21, rat(10, 3));
    }

    #[test]
    fn single_point_window_sums() {
        let s = s_sums_exact(&spec(4, 1));
        assert_eq!(s.s20, rat(2, 1));
        assert_eq!(s.s11, rat(4, 1));
    }

    #[test]
    fn closed_low_order_sums_are_exact_for_small_cases() {
        for (bn, dim) in [(4u64, 3u64), (4, 5), (10, 11), (100, 11), (200, 201)] {
            let sp = spec(bn, dim);
            let e = s_sums_exact(&sp);
            let c = s_sums_closed(&sp);
            assert_eq!(e.s20, c.s20, "S20 at N={bn} n={dim}");
            assert_eq!(e.s11, c.s11, "S11 at N={bn} n={dim}");
        }
    }

    #[test]
    fn closed_s20_reference_values() {
        // full sector at N=10: (N^2-2N)/4 + ((N+1)^2-1)/12 = 20 + 10
        let c = s_sums_closed(&spec(10, 11));
        assert_eq!(c.s20, rat(30, 1));
        let c2 = s_sums_closed(&spec(100, 11));
        assert_eq!(c2.s20, rat(2460, 1));
    }

    #[test]
    fn pair_sum_identity_cancels_the_window_dependence() {
        for (bn, dim) in [(4u64, 3u64), (12, 7), (100, 11), (2000, 501)] {
            let sp = spec(bn, dim);
            for s in [s_sums_exact(&sp), s_sums_closed(&sp)] {
                let total = s.s20 + s.s11;
                assert_eq!(total, rat((bn * (bn - 1) / 2) as i128, 1));
            }
        }
    }

    #[test]
    fn quartic_closed_residual_is_order_n_squared() {
        // residual of S40 against direct summation grows like N^2 at fixed n
        let mut prev: Option<(f64, f64)> = None;
        for bn in [50u64, 100, 200, 400, 800] {
            let sp = spec(bn, 11);
            let r = (rat_to_f64(s_sums_closed(&sp).s40) - rat_to_f64(s_sums_exact(&sp).s40)).abs();
            if let Some((pn, pr)) = prev {
                let slope = (r / pr).ln() / (bn as f64 / pn).ln();
                assert!(slope <= 2.1, "slope {slope}");
            }
            prev = Some((bn as f64, r));
        }
    }

    #[test]
    fn closed_mean_is_exact_for_plane_waves() {
        let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(1).unwrap());
        for (bn, dim) in [(4u64, 3u64), (100, 11), (1000, 101)] {
            let sp = spec(bn, dim);
            for q in [0i64, 2, 4] {
                let closed = mean_big_r_closed(&sp, &kernel, &Momentum::lattice_1d(q));
                let exact = exact_mean_big_r(&sp, &kernel, &Momentum::lattice_1d(q)).unwrap();
                assert_eq!(closed, exact, "N={bn} n={dim} q={q}");
            }
        }
    }

    #[test]
    fn closed_mean_at_zero_momentum_is_n_squared() {
        let kernel = ModeKernel::plane_wave(PlaneWaveModel::new_1d(2).unwrap());
        let sp = spec(100, 11);
        assert_eq!(
            mean_big_r_closed(&sp, &kernel, &Momentum::lattice_1d(0)),
            10_000.0
        );
    }
}
