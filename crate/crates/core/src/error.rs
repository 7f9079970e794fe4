use alloc::string::String;

/// Errors raised by the curvature library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument or evaluation point lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Input data does not satisfy a stated precondition (jet vanishing,
    /// dimension agreement, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The fixed-M root search ran out of admissible `h` before bracketing.
    #[error("no admissible root: sup of B_k over the admissible range is {sup}")]
    NoRoot { sup: f64 },

    /// A grid could not certify a monotone feasible/infeasible transition.
    #[error("grid resolution error: {0}")]
    Resolution(String),

    /// Every tested radius was feasible up to the search cap.
    #[error("lambda_bar unbounded: every radius up to {lambda_max} is feasible")]
    Unbounded { lambda_max: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
