//! Plane-wave specializations. The lattice deltas collapse every closed
//! form to a rational coefficient on the fringe peaks, so these are exact
//! rational functions of (N, n) apart from their stated order-N^2
//! truncation.

use crate::analytics::Rat;
use crate::fock::SubspaceSpec;
use crate::models::{Momentum, PlaneWaveModel};
use num_rational::Ratio;

fn rat(n: i128, d: i128) -> Rat {
    Ratio::new(n, d)
}

/// Weight of the fringe deltas: 1 at `k = +-2 k0`, else 0.
fn fringe_weight(model: &PlaneWaveModel, k: &Momentum) -> i128 {
    let Momentum::Lattice(v) = k else {
        return 0;
    };
    let k0 = model.k0();
    let plus = [2 * k0[0], 2 * k0[1], 2 * k0[2]];
    let minus = [-plus[0], -plus[1], -plus[2]];
    i128::from(*v == plus || *v == minus)
}

/// Truncated closed mean:
/// `N^2 delta_{k,0} + (N^2/4 - n^2/12)(delta_{k,-2k0} + delta_{k,2k0})`.
pub fn mean_closed(spec: &SubspaceSpec, model: &PlaneWaveModel, k: &Momentum) -> Rat {
    let nn = spec.particles() as i128;
    let n = spec.dim() as i128;
    if k.is_zero() {
        return rat(nn * nn, 1);
    }
    (rat(nn * nn, 4) - rat(n * n, 12)) * rat(fringe_weight(model, k), 1)
}

/// Truncated closed ensemble covariance:
/// `(n^3/180)(delta_{k,-2k0}+delta_{k,2k0})(delta_{k2,-2k0}+delta_{k2,2k0})`.
pub fn ensemble_cov_closed(
    spec: &SubspaceSpec,
    model: &PlaneWaveModel,
    k: &Momentum,
    k2: &Momentum,
) -> Rat {
    let n = spec.dim() as i128;
    rat(n * n * n, 180) * rat(fringe_weight(model, k) * fringe_weight(model, k2), 1)
}

/// Truncated closed averaged quantum covariance:
/// `(N^3/4 - N n^2/12 + (n^4 - n^3)/180)` on the fringe delta product.
pub fn quantum_cov_closed(
    spec: &SubspaceSpec,
    model: &PlaneWaveModel,
    k: &Momentum,
    k2: &Momentum,
) -> Rat {
    let nn = spec.particles() as i128;
    let n = spec.dim() as i128;
    let coeff = rat(nn * nn * nn, 4) - rat(nn * n * n, 12) + rat(n * n * n * n - n * n * n, 180);
    coeff * rat(fringe_weight(model, k) * fringe_weight(model, k2), 1)
}

/// Exact ensemble variance at the fringe, valid for every N:
/// `(n-1)(n-2)(n+2)/180`, the variance of the window's squared index under
/// the exact quartic measure. Independent check for the trace oracle.
pub fn ensemble_cov_exact_at_fringe(dim: u64) -> Rat {
    let n = dim as i128;
    rat((n - 1) * (n - 2) * (n + 2), 180)
}
