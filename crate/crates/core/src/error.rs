use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("grid size {0} is below the minimum of 8 points per axis")]
    GridTooSmall(usize),

    #[error("half-width L = {0} must be at least 1")]
    HalfWidthTooSmall(f64),

    #[error("fields live on different grids ({0}x{0} vs {1}x{1})")]
    GridMismatch(usize, usize),

    #[error("mollifier scale eps = {eps} under-resolved on spacing h = {h} (need eps >= 2h)")]
    UnderResolvedMollifier { eps: f64, h: f64 },

    #[error("grid spacing h = {0} too coarse to resolve the kernel cutoff (need h <= 1/8)")]
    KernelGridTooCoarse(f64),

    #[error("Hölder exponent {0} outside (0,1) ∪ (1,2)")]
    InvalidHolderExponent(f64),

    #[error("negative time t = {0} passed to the heat semigroup")]
    NegativeTime(f64),

    #[error("wavelet order r = {r} does not dominate |alpha| = {alpha_abs}")]
    InsufficientWaveletOrder { r: usize, alpha_abs: f64 },

    #[error("grid is incompatible with the wavelet basis: {0}")]
    BasisGridMismatch(String),

    #[error("too few usable wavelet levels ({0}, need at least {1})")]
    TooFewLevels(usize, usize),

    #[error("solution blew up: non-finite value at step {step} (t = {t}); \
             with C = 0 and small eps this is the unrenormalised divergence")]
    NonFiniteSolution { step: usize, t: f64 },

    #[error("Picard iteration did not converge within {iterations} iterations; \
             residual history {residuals:?} (shrink T and restart)")]
    PicardDiverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("time mesh mismatch between trajectory and solver config")]
    MeshMismatch,

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("walker start point ({0}, {1}) is outside the interior of the box")]
    WalkerStartOutside(f64, f64),

    #[error("scale parameter {name} = {value} under-resolved (need {name} >= {min})")]
    UnderResolvedScale {
        name: &'static str,
        value: f64,
        min: f64,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed PAMF data: {0}")]
    MalformedPamf(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
