//! Two-mode bosonic ensemble toolkit.
//!
//! Splitting a condensate of `N` bosons over two modes and drawing the
//! state uniformly from a window of relative-number Fock states makes the
//! density-correlation observable `R(k)` concentrate: almost every sampled
//! state shows the same fringe signal, even though the run-averaged
//! density is featureless. This crate provides the pieces needed to study
//! that concentration numerically at desk scale:
//!
//! - [`fock`]: the sampling subspace and reproducible uniform sampling;
//! - [`algebra`]: exact normal-ordered two-mode ladder algebra;
//! - [`wick`]: field-level contraction engine and exact-trace oracles for
//!   `R(k)` and `R(k) R(k')`;
//! - [`models`]: plane-wave and expanding-Gaussian mode kernels;
//! - [`analytics`]: every closed form (moment sums, means, covariances,
//!   variance coefficients);
//! - [`runner`]: Monte Carlo experiments, fringe reconstruction, scaling
//!   scans, and report comparison;
//! - [`report`]: JSON/CSV artifacts shared with the `bect` binary.
//!
//! Units: lengths in the Gaussian mode width, times in `m sigma^2/hbar`,
//! continuous momenta in inverse widths; plane-wave momenta are integer
//! lattice vectors on the unit box.

pub mod algebra;
pub mod analytics;
pub mod error;
pub mod fock;
pub mod models;
pub mod report;
pub mod runner;
pub mod wick;

pub use error::{Error, Result};
pub use fock::{EnsembleSampler, MomentEstimate, MomentIndices, StateVector, SubspaceSpec};
pub use models::{GaussianModel, Mode, ModeKernel, Momentum, PlaneWaveModel};
