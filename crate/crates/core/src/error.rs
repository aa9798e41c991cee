use thiserror::Error;

/// Errors produced by the polesim core library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("pole magnitude must be strictly below 1, got {0}")]
    UnstablePole(f64),

    #[error("denominator has a root of magnitude {0} on or outside the unit circle")]
    UnstableSystem(f64),

    #[error("signal sample at index {0} is not finite")]
    NonFiniteSample(usize),

    #[error("pole set must contain at least one pole")]
    EmptyPoleSet,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("model has no trained output weights; call train first")]
    NotTrained,

    #[error("state matrix is identically zero; input does not excite the reservoir")]
    DegenerateInput,

    #[error("prior has zero mass on the sampling interval")]
    ZeroMassPrior,

    #[error("reservoir eigenbasis is too ill-conditioned for diagonalization (cond = {0:.3e})")]
    IllConditionedEigenbasis(f64),

    #[error("reservoir matrix does not have a real, distinct eigenvalue spectrum")]
    ComplexSpectrum,

    #[error("log-log slope fit needs positive means and at least 3 rows")]
    UnfittableSlope,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
