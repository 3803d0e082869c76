use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("SOE certification failed: max relative error {max_rel_error:e} at t = {argmax_t:e} exceeds {epsilon:e}")]
    Certification {
        max_rel_error: f64,
        argmax_t: f64,
        epsilon: f64,
    },

    #[error("tridiagonal pivot breakdown at row {row} (step {step:?})")]
    PivotBreakdown { row: usize, step: Option<usize> },

    #[error("non-finite value in solution at step {step}")]
    NonFinite { step: usize },

    #[error("history update out of order: expected step {expected}, got {got}")]
    StepOrder { expected: usize, got: usize },

    #[error("unknown test case {0}")]
    UnknownCase(u32),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Certification { .. } | Error::PivotBreakdown { .. } | Error::NonFinite { .. }
        )
    }
}
