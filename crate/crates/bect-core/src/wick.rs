//! Field-level reduction of density-correlation operators onto the two-mode
//! sector, and the exact-trace oracles built on it.
//!
//! The squared density Fourier component splits as `R(k) = r(k) + N`, where
//! `r(k)` is the normal-ordered double integral of
//! `psi†(x) psi†(x') psi(x') psi(x)` against `exp(-i k (x - x'))`. Expanding
//! the fields in a complete mode basis and keeping what survives on two-mode
//! states gives, for each spatial integration point, one creator, one
//! annihilator, and one kernel factor `F_wv` at a momentum fixed by the
//! attached phases. Operator products pick up contraction terms from the
//! full field commutator, so intermediate states outside the two-mode span
//! are accounted for exactly.

use num_complex::Complex64;

use crate::algebra::{LadderMonomial, OperatorPoly, SectorOp};
use crate::error::Result;
use crate::fock::SubspaceSpec;
use crate::models::{Mode, ModeKernel, Momentum};

/// Momentum of one integration point as integer multiples of (k, k2).
#[derive(Debug, Clone, Copy)]
struct SymMomentum {
    c1: i64,
    c2: i64,
}

impl SymMomentum {
    const fn new(c1: i64, c2: i64) -> Self {
        SymMomentum { c1, c2 }
    }

    fn resolve(&self, k: &Momentum, k2: &Momentum) -> Momentum {
        Momentum::combine(self.c1, k, self.c2, k2)
    }
}

const MODES: [Mode; 2] = [Mode::A, Mode::B];

/// Sum over all mode assignments of a list of integration points. Point `p`
/// contributes the factor `F_{w_p v_p}(arg_p)` together with creator `w_p`
/// and annihilator `v_p`.
fn poly_from_points(
    kernel: &ModeKernel,
    k: &Momentum,
    k2: &Momentum,
    args: &[SymMomentum],
) -> OperatorPoly {
    let n = args.len();
    // kernel values per point and (creator, annihilator) pair
    let mut table = Vec::with_capacity(n);
    for arg in args {
        let q = arg.resolve(k, k2);
        let mut vals = [[Complex64::ZERO; 2]; 2];
        for (i, w) in MODES.iter().enumerate() {
            for (j, v) in MODES.iter().enumerate() {
                vals[i][j] = kernel.eval(*w, *v, &q);
            }
        }
        table.push(vals);
    }

    let mut poly = OperatorPoly::zero();
    // each point has 4 (creator, annihilator) choices
    let total = 1usize << (2 * n);
    for assign in 0..total {
        let mut coeff = Complex64::ONE;
        let mut adag = 0u32;
        let mut bdag = 0u32;
        let mut a = 0u32;
        let mut b = 0u32;
        let mut bits = assign;
        for vals in &table {
            let w = bits & 1;
            let v = (bits >> 1) & 1;
            bits >>= 2;
            let f = vals[w][v];
            if f == Complex64::ZERO {
                coeff = Complex64::ZERO;
                break;
            }
            coeff *= f;
            if w == 0 {
                adag += 1;
            } else {
                bdag += 1;
            }
            if v == 0 {
                a += 1;
            } else {
                b += 1;
            }
        }
        if coeff != Complex64::ZERO {
            poly.add_term(LadderMonomial::new(adag, bdag, a, b), coeff);
        }
    }
    poly
}

/// Two-mode part of `r(k)`: two integration points with kernel arguments
/// `k` and `-k`. Terms holding annihilators of other modes vanish on
/// two-mode states and are dropped; their creator partners reappear inside
/// products through the contraction terms of [`wick_product`].
pub fn build_r_poly(kernel: &ModeKernel, k: &Momentum) -> Result<OperatorPoly> {
    kernel.check_momentum(k)?;
    let zero = k.zero_like();
    Ok(poly_from_points(
        kernel,
        k,
        &zero,
        &[SymMomentum::new(1, 0), SymMomentum::new(-1, 0)],
    ))
}

/// Exact two-mode normal-ordered reduction of the product `r(k) r(k2)`.
///
/// Zero contractions give the eight-operator term (four points at
/// `k, -k, k2, -k2`); the four single contractions give six-operator terms
/// whose points carry the shifted arguments below; the two double
/// contractions collapse to `r(k + k2) + r(k - k2)`.
pub fn wick_product(kernel: &ModeKernel, k: &Momentum, k2: &Momentum) -> Result<OperatorPoly> {
    kernel.check_momentum(k)?;
    kernel.check_momentum(k2)?;
    let mut poly = poly_from_points(
        kernel,
        k,
        k2,
        &[
            SymMomentum::new(1, 0),
            SymMomentum::new(-1, 0),
            SymMomentum::new(0, 1),
            SymMomentum::new(0, -1),
        ],
    );
    let singles: [[SymMomentum; 3]; 4] = [
        [
            SymMomentum::new(1, 0),
            SymMomentum::new(-1, 1),
            SymMomentum::new(0, -1),
        ],
        [
            SymMomentum::new(1, 0),
            SymMomentum::new(-1, -1),
            SymMomentum::new(0, 1),
        ],
        [
            SymMomentum::new(1, 1),
            SymMomentum::new(-1, 0),
            SymMomentum::new(0, -1),
        ],
        [
            SymMomentum::new(1, -1),
            SymMomentum::new(-1, 0),
            SymMomentum::new(0, 1),
        ],
    ];
    for args in &singles {
        poly.add_assign(&poly_from_points(kernel, k, k2, args));
    }
    poly.add_assign(&build_r_poly(kernel, &k.add(k2))?);
    poly.add_assign(&build_r_poly(kernel, &k.sub(k2))?);
    Ok(poly)
}

/// Window average of `r(k)`: `(1/n) sum_l <l| r(k) |l>`.
pub fn exact_mean_r(spec: &SubspaceSpec, kernel: &ModeKernel, k: &Momentum) -> Result<f64> {
    let poly = build_r_poly(kernel, k)?;
    let op = SectorOp::new(&poly, spec)?;
    Ok(op.window_mean().re)
}

/// Ensemble mean of `R(k)` over the uniform window ensemble:
/// `N + (1/n) sum_l <l| r(k) |l>`.
pub fn exact_mean_big_r(spec: &SubspaceSpec, kernel: &ModeKernel, k: &Momentum) -> Result<f64> {
    Ok(spec.particles() as f64 + exact_mean_r(spec, kernel, k)?)
}

/// Exact run-to-run covariance of the expectation value of `R`:
/// `-(1/(n+1)) rbar(k) rbar(k2)
///  + (1/(n(n+1))) sum_{l1,l2} <l1|r(k)|l2><l2|r(k2)|l1>`.
pub fn exact_ensemble_cov(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    k: &Momentum,
    k2: &Momentum,
) -> Result<f64> {
    let pa = build_r_poly(kernel, k)?;
    let pb = build_r_poly(kernel, k2)?;
    let a = SectorOp::new(&pa, spec)?;
    let b = SectorOp::new(&pb, spec)?;
    let n = spec.dim() as f64;
    let rbar_a = a.window_mean().re;
    let rbar_b = b.window_mean().re;
    let cross = SectorOp::pair_trace(&a, &b).re;
    Ok(-rbar_a * rbar_b / (n + 1.0) + cross / (n * (n + 1.0)))
}

/// Ensemble average of the within-state quantum covariance of `R(k)` and
/// `R(k2)`: the window trace of the reduced product, minus the product of
/// window means of `r`, minus the ensemble covariance. The additive
/// particle-number part of `R` cancels throughout.
pub fn exact_quantum_cov_avg(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    k: &Momentum,
    k2: &Momentum,
) -> Result<f64> {
    let wick = wick_product(kernel, k, k2)?;
    let wick_op = SectorOp::new(&wick, spec)?;
    let ra = SectorOp::new(&build_r_poly(kernel, k)?, spec)?;
    let rb = SectorOp::new(&build_r_poly(kernel, k2)?, spec)?;
    let rr = wick_op.window_mean().re;
    let rbar_a = ra.window_mean().re;
    let rbar_b = rb.window_mean().re;
    let ens = exact_ensemble_cov(spec, kernel, k, k2)?;
    Ok(rr - rbar_a * rbar_b - ens)
}

/// Quantum variance of the mixed window state: `tr(rho R^2) - tr(rho R)^2`,
/// the sum of the averaged quantum covariance and the ensemble covariance.
pub fn exact_total_fluctuation(
    spec: &SubspaceSpec,
    kernel: &ModeKernel,
    k: &Momentum,
    k2: &Momentum,
) -> Result<f64> {
    let wick = wick_product(kernel, k, k2)?;
    let wick_op = SectorOp::new(&wick, spec)?;
    let ra = SectorOp::new(&build_r_poly(kernel, k)?, spec)?;
    let rb = SectorOp::new(&build_r_poly(kernel, k2)?, spec)?;
    Ok(wick_op.window_mean().re - ra.window_mean().re * rb.window_mean().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{GaussianModel, PlaneWaveModel};

    fn pw_kernel(k0: i64) -> ModeKernel {
        ModeKernel::plane_wave(PlaneWaveModel::new_1d(k0).unwrap())
    }

    fn lat(k: i64) -> Momentum {
        Momentum::lattice_1d(k)
    }

    #[test]
    fn plane_wave_r_poly_at_the_fringe_is_a_single_monomial() {
        let kernel = pw_kernel(1);
        let poly = build_r_poly(&kernel, &lat(2)).unwrap();
        assert_eq!(poly.term_count(), 1);
        assert_eq!(
            poly.coefficient(&LadderMonomial::new(1, 1, 1, 1)),
            Complex64::ONE
        );
    }

    #[test]
    fn plane_wave_r_poly_at_zero_counts_pairs() {
        // N(N-1) = Na(Na-1) + Nb(Nb-1) + 2 NaNb
        let kernel = pw_kernel(3);
        let poly = build_r_poly(&kernel, &lat(0)).unwrap();
        assert_eq!(
            poly.coefficient(&LadderMonomial::new(2, 0, 2, 0)),
            Complex64::ONE
        );
        assert_eq!(
            poly.coefficient(&LadderMonomial::new(0, 2, 0, 2)),
            Complex64::ONE
        );
        assert_eq!(
            poly.coefficient(&LadderMonomial::new(1, 1, 1, 1)),
            Complex64::new(2.0, 0.0)
        );
        assert_eq!(poly.term_count(), 3);
    }

    #[test]
    fn gaussian_r_poly_at_the_fringe_is_dominated_by_the_cross_kernel() {
        let model = GaussianModel::new(5.0, 50.0).unwrap();
        let kernel = ModeKernel::gaussian(model);
        let k = Momentum::Real(2.0 * model.k0_of_t());
        let poly = build_r_poly(&kernel, &k).unwrap();
        let nanb = poly.coefficient(&LadderMonomial::new(1, 1, 1, 1)).re;
        let expect = (-2.0 * 25.0 / 2501.0f64).exp();
        assert!((nanb - expect).abs() < 1e-12);
        assert!((nanb - 0.9802).abs() < 1e-4);
        for (m, c) in poly.terms() {
            if *m != LadderMonomial::new(1, 1, 1, 1) {
                assert!(c.norm() < 1e-8, "{m:?} -> {c}");
            }
        }
    }

    #[test]
    fn r_poly_is_self_adjoint_for_both_models() {
        let kernel = pw_kernel(2);
        for q in [-4, -2, 0, 2, 4, 6] {
            assert!(build_r_poly(&kernel, &lat(q)).unwrap().is_self_adjoint(1e-14));
        }
        let g = ModeKernel::gaussian(GaussianModel::new(4.0, 11.0).unwrap());
        for q in [-0.7, 0.0, 0.3, 1.9] {
            assert!(build_r_poly(&g, &Momentum::Real(q)).unwrap().is_self_adjoint(1e-14));
        }
    }

    #[test]
    fn dropping_contractions_reproduces_the_two_mode_product() {
        // zero-contraction consistency: the 8-operator block alone equals
        // the normal-ordered product of the two reduced polynomials
        let cases: Vec<(ModeKernel, Momentum, Momentum)> = vec![
            (pw_kernel(1), lat(2), lat(2)),
            (pw_kernel(1), lat(2), lat(-2)),
            (pw_kernel(2), lat(0), lat(4)),
            (
                ModeKernel::gaussian(GaussianModel::new(5.0, 50.0).unwrap()),
                Momentum::Real(0.19992),
                Momentum::Real(-0.11),
            ),
        ];
        for (kernel, k, k2) in cases {
            let eight = poly_from_points(
                &kernel,
                &k,
                &k2,
                &[
                    SymMomentum::new(1, 0),
                    SymMomentum::new(-1, 0),
                    SymMomentum::new(0, 1),
                    SymMomentum::new(0, -1),
                ],
            );
            let product = build_r_poly(&kernel, &k)
                .unwrap()
                .multiply(&build_r_poly(&kernel, &k2).unwrap());
            // keep only the fully normal-ordered 4+4 part of the product
            let mut top = OperatorPoly::zero();
            for (m, c) in product.terms() {
                if m.adag + m.bdag == 4 {
                    top.add_term(*m, *c);
                }
            }
            let mut diff = eight.clone();
            diff.add_assign(&top.scaled(Complex64::new(-1.0, 0.0)));
            let worst = diff.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-12, "worst {worst}");
        }
    }

    #[test]
    fn wick_product_is_hermitian_at_opposite_momenta() {
        let kernel = pw_kernel(1);
        let p = wick_product(&kernel, &lat(2), &lat(-2)).unwrap();
        assert!(p.is_self_adjoint(1e-12));
        let g = ModeKernel::gaussian(GaussianModel::new(5.0, 50.0).unwrap());
        let q = wick_product(&g, &Momentum::Real(0.2), &Momentum::Real(-0.2)).unwrap();
        assert!(q.is_self_adjoint(1e-12));
    }

    #[test]
    fn two_particle_variance_counts_the_out_of_sector_pair() {
        // N=2, n=1, plane waves, k=k2=2k0: the only surviving pieces of the
        // product are the double contractions r(0) + r(4 k0); the variance
        // of R at the fringe is exactly 1.
        let spec = SubspaceSpec::new(2, 1).unwrap();
        let kernel = pw_kernel(1);
        let var = exact_quantum_cov_avg(&spec, &kernel, &lat(2), &lat(2)).unwrap();
        assert_eq!(var, 1.0);
        // cross-check the full second moment <R^2> = 10 at <R> = 3
        let wick = wick_product(&kernel, &lat(2), &lat(2)).unwrap();
        let wick_avg = SectorOp::new(&wick, &spec).unwrap().window_mean().re;
        let rbar = exact_mean_r(&spec, &kernel, &lat(2)).unwrap();
        let n = spec.particles() as f64;
        let second_moment = wick_avg + 2.0 * n * rbar + n * n;
        assert_eq!(second_moment, 10.0);
        assert_eq!(n + rbar, 3.0);
    }

    #[test]
    fn mean_of_big_r_at_zero_momentum_is_n_squared() {
        for (bn, dim) in [(4u64, 3u64), (4, 5), (100, 11), (1000, 101)] {
            let spec = SubspaceSpec::new(bn, dim).unwrap();
            let kernel = pw_kernel(1);
            let val = exact_mean_big_r(&spec, &kernel, &lat(0)).unwrap();
            assert_eq!(val, (bn * bn) as f64);
        }
    }

    #[test]
    fn mean_of_big_r_at_the_fringe_matches_the_window_sum() {
        let spec = SubspaceSpec::new(4, 3).unwrap();
        let kernel = pw_kernel(1);
        let val = exact_mean_big_r(&spec, &kernel, &lat(2)).unwrap();
        assert!((val - 22.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ensemble_cov_vanishes_for_a_one_dimensional_window() {
        let spec = SubspaceSpec::new(10, 1).unwrap();
        let kernel = pw_kernel(1);
        for q in [0, 2, 4] {
            assert_eq!(exact_ensemble_cov(&spec, &kernel, &lat(q), &lat(q)).unwrap(), 0.0);
        }
        let g = ModeKernel::gaussian(GaussianModel::new(5.0, 10.0).unwrap());
        let v = exact_ensemble_cov(&spec, &g, &Momentum::Real(0.5), &Momentum::Real(0.5)).unwrap();
        assert!(v.abs() < 1e-18);
    }

    #[test]
    fn ensemble_cov_matches_the_three_level_hand_value() {
        // N=4, n=3 at the fringe: diagonal elements {3,4,3} under the exact
        // quartic measure give 17/6 - 25/9 = 1/18
        let spec = SubspaceSpec::new(4, 3).unwrap();
        let kernel = pw_kernel(1);
        let v = exact_ensemble_cov(&spec, &kernel, &lat(2), &lat(2)).unwrap();
        assert!((v - 1.0 / 18.0).abs() < 1e-14);
    }

    #[test]
    fn ensemble_cov_is_symmetric_and_nonnegative_on_the_diagonal() {
        let spec = SubspaceSpec::new(20, 7).unwrap();
        let g = ModeKernel::gaussian(GaussianModel::new(5.0, 20.0).unwrap());
        let k = Momentum::Real(2.0 * 5.0 * 20.0 / 401.0);
        let k2 = Momentum::Real(0.03);
        let ab = exact_ensemble_cov(&spec, &g, &k, &k2).unwrap();
        let ba = exact_ensemble_cov(&spec, &g, &k2, &k).unwrap();
        assert!((ab - ba).abs() < 1e-12 * ab.abs().max(1.0));
        for q in [k, k2, Momentum::Real(0.0)] {
            assert!(exact_ensemble_cov(&spec, &g, &q, &q).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn quantum_variance_of_the_total_number_vanishes() {
        // r(0) is diagonal; every sector state is an eigenstate of R(0)
        let spec = SubspaceSpec::new(12, 5).unwrap();
        let kernel = pw_kernel(1);
        let v = exact_quantum_cov_avg(&spec, &kernel, &lat(0), &lat(0)).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn decomposition_identity_links_the_three_traces() {
        let spec = SubspaceSpec::new(30, 9).unwrap();
        let g = ModeKernel::gaussian(GaussianModel::new(5.0, 25.0).unwrap());
        let k = Momentum::Real(0.35);
        let k2 = Momentum::Real(-0.1);
        let total = exact_total_fluctuation(&spec, &g, &k, &k2).unwrap();
        let parts = exact_quantum_cov_avg(&spec, &g, &k, &k2).unwrap()
            + exact_ensemble_cov(&spec, &g, &k, &k2).unwrap();
        assert!((total - parts).abs() < 1e-9 * total.abs().max(1.0));
    }
}
