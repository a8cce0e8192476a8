//! Mode models and their Fourier kernels.
//!
//! A kernel supplies the four transforms
//! `F_xy(q) = integral conj(psi_x) psi_y exp(-i q r) dr` for modes
//! `x, y in {a, b}`. Two models are provided: counterpropagating plane
//! waves on a unit box (exact 0/1 lattice deltas) and a pair of expanding
//! Gaussians in one dimension with free time evolution.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// A momentum argument: integer lattice vector (units of 2 pi over the box
/// side) or a continuous 1-D value (units of inverse mode width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Momentum {
    Lattice([i64; 3]),
    Real(f64),
}

impl Momentum {
    pub fn lattice_1d(k: i64) -> Self {
        Momentum::Lattice([k, 0, 0])
    }

    pub fn zero_like(&self) -> Self {
        match self {
            Momentum::Lattice(_) => Momentum::Lattice([0, 0, 0]),
            Momentum::Real(_) => Momentum::Real(0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Momentum::Lattice(v) => *v == [0, 0, 0],
            Momentum::Real(x) => *x == 0.0,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Momentum::Lattice(v) => Momentum::Lattice([-v[0], -v[1], -v[2]]),
            Momentum::Real(x) => Momentum::Real(-x),
        }
    }

    /// `c1 * k + c2 * k2`; both momenta must share a kind.
    pub fn combine(c1: i64, k: &Momentum, c2: i64, k2: &Momentum) -> Self {
        match (k, k2) {
            (Momentum::Lattice(u), Momentum::Lattice(v)) => Momentum::Lattice([
                c1 * u[0] + c2 * v[0],
                c1 * u[1] + c2 * v[1],
                c1 * u[2] + c2 * v[2],
            ]),
            (Momentum::Real(x), Momentum::Real(y)) => {
                Momentum::Real(c1 as f64 * x + c2 as f64 * y)
            }
            _ => panic!("cannot combine lattice and continuous momenta"),
        }
    }

    pub fn add(&self, other: &Momentum) -> Self {
        Momentum::combine(1, self, 1, other)
    }

    pub fn sub(&self, other: &Momentum) -> Self {
        Momentum::combine(1, self, -1, other)
    }

    /// Numeric view used for reports: lattice components as floats.
    pub fn as_components(&self) -> [f64; 3] {
        match self {
            Momentum::Lattice(v) => [v[0] as f64, v[1] as f64, v[2] as f64],
            Momentum::Real(x) => [*x, 0.0, 0.0],
        }
    }
}

/// Two counterpropagating plane waves `exp(+- i k0 r)` on a unit box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlaneWaveModel {
    k0: [i64; 3],
}

impl PlaneWaveModel {
    pub fn new(k0: [i64; 3]) -> Result<Self> {
        if k0 == [0, 0, 0] {
            return Err(Error::ZeroFringeMomentum);
        }
        Ok(PlaneWaveModel { k0 })
    }

    pub fn new_1d(k0: i64) -> Result<Self> {
        Self::new([k0, 0, 0])
    }

    pub fn k0(&self) -> [i64; 3] {
        self.k0
    }

    /// Lattice momentum of the interference peak, `2 k0`.
    pub fn fringe_momentum(&self) -> Momentum {
        Momentum::Lattice([2 * self.k0[0], 2 * self.k0[1], 2 * self.k0[2]])
    }
}

/// Two Gaussian wave packets of unit width centered at `-alpha` and
/// `+alpha`, expanding freely for a time `t` (lengths in units of the
/// width, times in units of m sigma^2 / hbar).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianModel {
    alpha: f64,
    t: f64,
}

/// Default ceiling on the mode overlap `exp(-alpha^2)` below which the
/// two packets are treated as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

impl GaussianModel {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        if !(alpha.is_finite() && t.is_finite() && alpha > 0.0 && t >= 0.0) {
            return Err(Error::BadGaussianModel { alpha, t });
        }
        Ok(GaussianModel { alpha, t })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Half the fringe wavevector, `k0(t) = alpha t / (1 + t^2)`.
    pub fn k0_of_t(&self) -> f64 {
        self.alpha * self.t / (1.0 + self.t * self.t)
    }

    /// Fringe peak position in momentum space, `2 k0(t)`.
    pub fn fringe_momentum(&self) -> Momentum {
        Momentum::Real(2.0 * self.k0_of_t())
    }

    /// Mode overlap `exp(-alpha^2)`; time-independent under free evolution.
    pub fn orthogonality_report(&self) -> f64 {
        (-self.alpha * self.alpha).exp()
    }

    /// True if the overlap is at or below `tol`.
    pub fn is_quasi_orthogonal(&self, tol: f64) -> bool {
        self.orthogonality_report() <= tol
    }

    /// Spatial density of one evolved packet at position x:
    /// `exp(-(x -+ center)^2/(1+t^2)) / sqrt(pi (1+t^2))`.
    pub fn mode_density(&self, mode: Mode, x: f64) -> f64 {
        let center = match mode {
            Mode::A => -self.alpha,
            Mode::B => self.alpha,
        };
        let w = 1.0 + self.t * self.t;
        (-(x - center) * (x - center) / w).exp() / (std::f64::consts::PI * w).sqrt()
    }
}

/// A mode model together with its four Fourier kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ModeKernel {
    PlaneWave(PlaneWaveModel),
    Gaussian(GaussianModel),
}

impl ModeKernel {
    pub fn plane_wave(model: PlaneWaveModel) -> Self {
        ModeKernel::PlaneWave(model)
    }

    pub fn gaussian(model: GaussianModel) -> Self {
        ModeKernel::Gaussian(model)
    }

    /// True if momenta live on the integer lattice.
    pub fn is_lattice(&self) -> bool {
        matches!(self, ModeKernel::PlaneWave(_))
    }

    /// Momentum of the interference fringe peak, `2 k0` or `2 k0(t)`.
    pub fn fringe_momentum(&self) -> Momentum {
        match self {
            ModeKernel::PlaneWave(m) => m.fringe_momentum(),
            ModeKernel::Gaussian(m) => m.fringe_momentum(),
        }
    }

    /// Check a momentum argument against the kernel kind.
    pub fn check_momentum(&self, q: &Momentum) -> Result<()> {
        let ok = match (self, q) {
            (ModeKernel::PlaneWave(_), Momentum::Lattice(_)) => true,
            (ModeKernel::Gaussian(_), Momentum::Real(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::MomentumKind)
        }
    }

    /// Evaluate `F_xy(q)`. The momentum kind must match the kernel.
    pub fn eval(&self, x: Mode, y: Mode, q: &Momentum) -> Complex64 {
        match self {
            ModeKernel::PlaneWave(m) => {
                let Momentum::Lattice(v) = q else {
                    panic!("plane-wave kernel takes lattice momenta");
                };
                let k0 = m.k0();
                let target = match (x, y) {
                    // densities are flat: transforms live at q = 0
                    (Mode::A, Mode::A) | (Mode::B, Mode::B) => [0, 0, 0],
                    // conj(psi_a) psi_b carries momentum -2 k0
                    (Mode::A, Mode::B) => [-2 * k0[0], -2 * k0[1], -2 * k0[2]],
                    (Mode::B, Mode::A) => [2 * k0[0], 2 * k0[1], 2 * k0[2]],
                };
                if *v == target {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            }
            ModeKernel::Gaussian(m) => {
                let Momentum::Real(k) = q else {
                    panic!("gaussian kernel takes real momenta");
                };
                let k = *k;
                let alpha = m.alpha();
                let t = m.t();
                let w = 1.0 + t * t;
                match (x, y) {
                    (Mode::A, Mode::A) => {
                        (-0.25 * w * k * k).exp() * Complex64::cis(k * alpha)
                    }
                    (Mode::B, Mode::B) => {
                        (-0.25 * w * k * k).exp() * Complex64::cis(-k * alpha)
                    }
                    // exp(-(1+t^2)k^2/4 - alpha t k - alpha^2), the completed
                    // square of exp(-alpha^2/(1+t^2) - (1+t^2)(k + 2 k0)^2/4)
                    (Mode::A, Mode::B) => {
                        Complex64::new((-0.25 * w * k * k - alpha * t * k - alpha * alpha).exp(), 0.0)
                    }
                    (Mode::B, Mode::A) => {
                        Complex64::new((-0.25 * w * k * k + alpha * t * k - alpha * alpha).exp(), 0.0)
                    }
                }
            }
        }
    }
}
