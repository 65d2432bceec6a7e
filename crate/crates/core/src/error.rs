use std::fmt;

use thiserror::Error;

/// A single violated parameter constraint, with the offending value.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub parameter: &'static str,
    pub value: f64,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} violates {}", self.parameter, self.value, self.constraint)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma function pole at z = {0}")]
    Pole(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violations: {}", join(.0))]
    Constraint(Vec<Violation>),

    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("{what} did not converge (error estimate {estimate:.3e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("no vertical contour separates the pole families ({0})")]
    ContourPlacement(String),

    #[error("{what}: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    #[error("kernel is not representable in real space: {0}")]
    FourierOnly(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("time stepping became unstable at step {step} (|u| = {magnitude:.3e})")]
    Instability { step: usize, magnitude: f64 },

    #[error("time grid too coarse: estimated relative error {estimate:.3e} > {tolerance:.3e}")]
    TimeGridTooCoarse { estimate: f64, tolerance: f64 },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by parameters that violate the equation's constraints.
    pub fn is_constraint(&self) -> bool {
        matches!(
            self,
            Error::Constraint(_) | Error::Regime(_) | Error::InvalidParameter(_) | Error::Domain(_)
        )
    }

    /// True for failures of a numerical method to reach its tolerance.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::ContourPlacement(_)
                | Error::Accuracy { .. }
                | Error::FourierOnly(_)
                | Error::Instability { .. }
                | Error::TimeGridTooCoarse { .. }
                | Error::NonFinite(_)
                | Error::Pole(_)
        )
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
