use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One violated admissibility condition on `(N, alpha, beta)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamViolation {
    DimensionTooSmall { n: u32 },
    AlphaOutOfRange { alpha: f64, min: f64 },
    BetaOutOfRange { beta: f64, lo: f64, hi: f64 },
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamViolation::DimensionTooSmall { n } => {
                write!(f, "dimension too small: N = {n} < 5")
            }
            ParamViolation::AlphaOutOfRange { alpha, min } => {
                write!(f, "alpha out of range: alpha = {alpha} must exceed 2 - N = {min}")
            }
            ParamViolation::BetaOutOfRange { beta, lo, hi } => {
                write!(f, "beta out of range: beta = {beta} must satisfy {lo} < beta <= {hi}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<ParamViolation>),

    #[error("divergent integral ({what}): power {power} at {endpoint}")]
    Divergent {
        what: String,
        endpoint: &'static str,
        power: f64,
    },

    #[error(
        "quadrature did not reach tolerance: best estimate {value:e}, error estimate {abs_error:e} after {nodes} nodes"
    )]
    Accuracy { value: f64, abs_error: f64, nodes: usize },

    #[error("ill-conditioned Gram matrix (condition {condition:e}); use a smaller basis")]
    Conditioning { condition: f64 },

    #[error("no sign change of the spectral minimum on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
}

fn join(v: &[ParamViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
