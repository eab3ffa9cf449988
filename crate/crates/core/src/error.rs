use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation point {z} is within {eps:e} of the pole at {pole}")]
    PoleProximity { z: Complex64, pole: Complex64, eps: f64 },

    #[error("evaluation point {0} lies outside the closed upper half-plane")]
    LowerHalfPlane(Complex64),

    #[error("strip argument {0} has imaginary part outside [0, pi]")]
    OutsideStrip(Complex64),

    #[error("Blaschke zero {0} must lie in the open upper half-plane")]
    InvalidZero(Complex64),

    #[error("overall sign must be +1 or -1, got {0}")]
    InvalidSign(f64),

    #[error("invalid flip set: {0}")]
    InvalidFlip(String),

    #[error("roots are not evaluated at t = 0")]
    ZeroArgument,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected {expected}, found {found}")]
    GridMismatch { expected: String, found: String },

    #[error("boosts need a rapidity-uniform or geometric grid layout")]
    Layout,

    #[error("r(t)^2 deviates from 1 by {deviation:e} at t = {t}")]
    NotRootOfUnity { t: f64, deviation: f64 },

    #[error("support violation: {0}")]
    Support(String),

    #[error("truncation {found} is below the required minimum {required}")]
    Truncation { required: usize, found: usize },

    #[error("invalid kernel spec: {0}")]
    InvalidKernel(String),

    #[error("invalid test function data: {0}")]
    InvalidTestFunction(String),

    #[error("malformed vector data: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
