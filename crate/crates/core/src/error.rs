use thiserror::Error;

use crate::expr::ExprError;
use crate::timescale::TimeScaleError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    TimeScale(#[from] TimeScaleError),

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("integration endpoints {a} and {b} are not an ordered pair of time-scale points")]
    EndpointsNotInTimeScale { a: f64, b: f64 },

    #[error("adaptive quadrature on [{a}, {b}] did not reach tolerance {tol:e} within its budget")]
    QuadratureNonConvergence { a: f64, b: f64, tol: f64 },

    #[error("not regressive at t = {t}: jump factor {factor:e} is (numerically) zero")]
    NotRegressive { t: f64, factor: f64 },

    #[error("q({t}) = 0 at a right-scattered point")]
    ZeroQ { t: f64 },

    #[error("q({t}) = {value} is not positive on a right-dense point")]
    NegativeQOnDense { t: f64, value: f64 },

    #[error("phase function vanishes at t = {t}")]
    PhiVanishes { t: f64 },

    #[error("nested depth {n} exceeds the budget of {max} on a scale with dense parts")]
    DepthBudgetExceeded { n: usize, max: usize },

    #[error("time scale is not a single continuous interval covering the period")]
    NotContinuousScale,

    #[error("the continuous-scale formula requires B = 1, got B = {0}")]
    BNotOne(f64),

    #[error("Runge-Kutta step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error(
        "cross-check failed: A(series) = {a_series}, A(oracle) = {a_oracle}, allowed {a_allowed:e}; \
         B(Liouville) = {b_liouville}, B(oracle) = {b_oracle}"
    )]
    CheckFailed {
        a_series: f64,
        a_oracle: f64,
        a_allowed: f64,
        b_liouville: f64,
        b_oracle: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
