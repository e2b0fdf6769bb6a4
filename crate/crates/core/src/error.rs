use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested Hilbert dimension {requested} exceeds the configured maximum {max}")]
    DimensionOverflow { requested: usize, max: usize },

    #[error("matrix is not Hermitian: max |m - m^dag| entry = {asymmetry:.3e}")]
    NotHermitian { asymmetry: f64 },

    #[error("numerically singular system: pivot {pivot:.3e} below {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("eigendecomposition failed to converge")]
    EigFailed,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site index {0} out of range (expected 1 or 2)")]
    SiteOutOfRange(usize),

    #[error("time step {dt:.3e} violates the stability bound; use dt <= {suggested:.3e}")]
    UnstableTimeStep { dt: f64, suggested: f64 },

    #[error(
        "diffusion coefficient nu_{site} = {nu:.6} < 0: the noisy classical model is only \
         valid in the weak quantum regime (k1 > k2)"
    )]
    NegativeDiffusion { site: usize, nu: f64 },

    #[error("steady state appears degenerate: {0}")]
    DegenerateSteadyState(String),

    #[error("divergent trajectory: |state| exceeded {0:.3e}")]
    Divergence(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
