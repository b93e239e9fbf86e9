use thiserror::Error;

use crate::evolution::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("derivative order {order} exceeds the grid limit {limit}")]
    OrderOverflow { order: usize, limit: usize },

    #[error("fields live on different grids")]
    IncompatibleGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integral of (1+xi^2)^-s diverges for s = {0} (need s > 1/2)")]
    DivergentIntegral(f64),

    #[error("sequence entry {index} is negative or not finite")]
    NegativeEntry { index: usize },

    #[error("datum not admissible: {0}")]
    InadmissibleDatum(String),

    #[error("degenerate datum: the analytic norm vanishes")]
    DegenerateDatum,

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("Taylor coefficients overflowed after order {last_valid}")]
    Overflow { last_valid: usize },

    #[error("only {usable} usable orders in the fit window, need {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    /// `last_good` holds the trajectory up to the last finite snapshot when
    /// the failure happened inside a full run.
    #[error("solution blew up at t = {time}")]
    Blowup {
        time: f64,
        last_good: Option<Box<Trajectory>>,
    },

    #[error("radius indeterminate: no usable modes in the fit window")]
    IndeterminateRadius,
}
