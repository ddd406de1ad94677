//! Independent numerical ground truth for the series modules: a Talbot-contour
//! inverse Laplace transform, forward Laplace quadrature, and a product-integration
//! solver for linear multi-term Caputo fractional ODEs.
//!
//! None of these use the Mittag-Leffler series machinery, so agreement with it
//! is evidence rather than tautology.

mod fode;
mod laplace;
mod talbot;

use thiserror::Error;

pub use fode::{solve_fode, FodeProblem, FodeSolution, FractionalTerm};
pub use laplace::{forward_laplace, LaplaceEstimate};
pub use talbot::{talbot_invert, talbot_invert_real, TalbotConfig, TalbotEstimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("Talbot self-check failed: halving the nodes changed the result by {difference:e} (target {target:e})")]
    OracleNotConverged { difference: f64, target: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("step self-check failed: halving the step count changed the solution by {difference:e} (tolerance {tolerance:e})")]
    StepTooCoarse { difference: f64, tolerance: f64 },
}
