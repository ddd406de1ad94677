//! Spectral solvers for linear fractional reaction-diffusion equations on the
//! line. Each Fourier mode is solved in closed form by the Mittag-Leffler
//! series of `inversion` and the field is assembled by a discrete inverse
//! Fourier transform. Modes and times are independent, so both are evaluated in
//! parallel and gathered in a fixed order.

mod field;
mod green;
mod grid;
mod mode;
mod presets;
mod problem;
mod telegraph;

use thiserror::Error;

use crate::inversion::InversionError;
use crate::ml::MlError;
use crate::oracles::OracleError;

pub use field::{oracle_field, solve_field, FieldDiagnostics, ModeDiagnostic, SolutionTable, SolveOptions};
pub use green::{green_route, GreenOptions};
pub use grid::SpectralGrid;
pub use mode::{mode_solution, mode_solution_multi_term, mode_solution_three_term, ModeFormula, ModeOptions, ModeValue};
pub use telegraph::{
    telegraph_mode, telegraph_mode_with_form, telegraph_solution, telegraph_solution_with_form, TelegraphForm, TelegraphMode,
    TelegraphParams, CONFLUENT_THRESHOLD,
};
pub use presets::{preset_problem, Preset};
pub use problem::{
    InitialCondition, ModeCoefficient, ModeSource, Profile, ProfileSpectrum, RdProblem, Source, SourceField, SourceSpectrum,
    TimeOperator,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid times: {0}")]
    InvalidTimes(String),
    #[error("mode evaluation failed: {0}")]
    ModeFailure(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Inversion(#[from] InversionError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
