//! Linear echo state networks for first-order IIR system approximation.
//!
//! A linear ESN with a diagonal reservoir is a bank of single-pole IIR
//! filters whose outputs are mixed by a trained linear readout. This crate
//! implements the closed-form analysis of how well such a bank can
//! approximate a first-order target system:
//!
//! - [`lti`]: all-pole systems, signals, filtering.
//! - [`projection`]: Gram-matrix projection of a normalized target onto a
//!   pole basis, the two-pole neighborhood error, and its worst-case bounds.
//! - [`sampling`]: the pole density `(1/C)/(1 - beta^2)` that equalizes
//!   neighborhood errors, with rejection and inverse-CDF samplers.
//! - [`reservoir`]: diagonal and dense reservoirs, pseudo-inverse readout
//!   training, and the diagonalization equivalence.
//! - [`experiments`]: seeded Monte-Carlo drivers for the error-scaling and
//!   train/test loss studies, with CSV/JSON table output.
//! - [`stats`], [`rng`]: Kolmogorov-Smirnov distances and deterministic
//!   per-trial substream derivation.

pub mod error;
pub mod experiments;
pub mod lti;
pub mod projection;
pub mod reservoir;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use experiments::{
    aic_optimal_order, default_reservoir_sizes, fit_loglog_slope, higher_order, interconnected,
    projection_scaling, results_to_csv, results_to_json, sample_poles, sequence_scaling,
    train_test, ExperimentResult, ExperimentRow, MonteCarloConfig, ReservoirKind, SamplerKind,
    CSV_HEADER,
};
pub use lti::{impulse_response, Pole, RationalIir, Signal};
pub use projection::{
    basis_inner_product, build_gram, error_bound, error_bound_leading_order,
    midpoint_derivative_exact, midpoint_error_exact, project, two_pole_error, GramSystem, PoleSet,
    ProjectionResult,
};
pub use reservoir::{
    diagonalize_check, spectral_radius, DenseReservoir, DiagonalReservoir, DiagonalizationReport,
    EsnModel, Reservoir, TrainConfig,
};
pub use sampling::{reweighted, OptimalPoleDistribution, ReweightedDistribution, UniformPrior};
