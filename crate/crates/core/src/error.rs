use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument {value} outside domain ({reason})")]
    Domain {
        func: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{func}: result overflows at argument {value}")]
    Overflow { func: &'static str, value: f64 },

    #[error("{func}: series did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("coefficient {index} is not representable (overflow)")]
    CoefficientOverflow { index: usize },

    #[error(
        "insufficient data: need at least {needed} nonzero coefficients, table has {available}"
    )]
    InsufficientData { needed: usize, available: usize },

    #[error("non-finite value produced at step {step}")]
    StepOverflow { step: usize },

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

impl Error {
    /// True for failures of the arithmetic itself (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NonConvergence { .. }
                | Error::CoefficientOverflow { .. }
                | Error::StepOverflow { .. }
        )
    }
}
