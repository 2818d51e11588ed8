//! Error types shared across the solver.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum SimError {
    #[error("singular matrix: |det| = {det:.3e} at or below floor {floor:.3e}")]
    SingularMatrix { det: f64, floor: f64 },

    #[error("non-positive determinant: det = {det:.6e}")]
    NonPositiveDeterminant { det: f64 },

    #[error("negative temperature argument: theta = {theta:.6e}")]
    NegativeTemperature { theta: f64 },

    #[error("input has trace {trace:.3e} relative to norm {norm:.3e}; expected deviatoric")]
    NonDeviatoricInput { trace: f64, norm: f64 },

    #[error("plastic rate has nonzero trace {trace:.3e}; expected deviatoric")]
    NonDeviatoricRate { trace: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what} linear solve failed after {iterations} iterations (residual {residual:.3e})")]
    LinearSolveFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("CFL number {cfl:.3} exceeds cap {cap:.3}")]
    CflViolation { cfl: f64, cap: f64 },

    #[error("negative enthalpy w = {w:.6e} at cell ({i},{j})")]
    NegativeEnthalpy { w: f64, i: usize, j: usize },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error: {0}")]
    Validation(String),

    #[error("unknown name: {name}")]
    UnknownName { name: String },

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
