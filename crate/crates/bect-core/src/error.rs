use thiserror::Error;

/// Errors produced by subspace validation, state handling, and experiment
/// configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("N must be even (got N={0})")]
    OddParticleCount(u64),
    #[error("N must be at least 2 (got N={0})")]
    ParticleCountTooSmall(u64),
    #[error("n must be odd (got n={0})")]
    EvenSubspaceDim(u64),
    #[error("n must be at least 1 (got n={0})")]
    SubspaceDimTooSmall(u64),
    #[error("n must not exceed N+1 (got n={n}, N={big_n})")]
    SubspaceDimTooLarge { n: u64, big_n: u64 },
    #[error("fock index {index} outside the full sector (|l| must be <= N/2 = {half_n})")]
    IndexOutsideSector { index: i64, half_n: u64 },
    #[error("fock index {index} outside the sampling subspace (|l| must be <= {max})")]
    IndexOutsideSubspace { index: i64, max: i64 },
    #[error("state is not normalized: |sum|z|^2 - 1| = {0:.3e} exceeds 1e-12")]
    NotNormalized(f64),
    #[error("coefficient count {got} does not match subspace dimension {expected}")]
    CoefficientCount { got: usize, expected: usize },
    #[error("samples mix different subspace specs")]
    MixedSpecs,
    #[error("no samples provided")]
    NoSamples,
    #[error("samples must be at least 2 (got {0})")]
    TooFewSamples(usize),
    #[error("momentum kind does not match the kernel (lattice kernels take integer lattice momenta, continuous kernels take real momenta)")]
    MomentumKind,
    #[error("plane-wave k0 must be a nonzero lattice vector")]
    ZeroFringeMomentum,
    #[error("gaussian model requires finite alpha > 0 and finite t >= 0 (got alpha={alpha}, t={t})")]
    BadGaussianModel { alpha: f64, t: f64 },
    #[error("momentum grid is empty")]
    EmptyGrid,
    #[error("comparison requires identical momentum grids")]
    GridMismatch,
    #[error("scaling scan needs at least 3 particle counts (got {0})")]
    ScanTooShort(usize),
    #[error("unknown regime selector '{0}' (expected 'quantum' or 'statistical')")]
    BadRegime(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed report {path}: {message}")]
    MalformedReport { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
