use thiserror::Error;

use crate::table::Arity;

/// Errors surfaced by the return engines, tables, learners, environments,
/// and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation that needs a full experience window was called early.
    #[error("experience buffer holds {len} of {capacity} records")]
    BufferNotFull { len: usize, capacity: usize },

    /// The incremental recursions divide by gamma*lambda; below the floor the
    /// caller must fall back to the iterative engine.
    #[error("gamma*lambda = {gamma_lambda:e} is at or below the incremental-engine floor {floor:e}")]
    DegenerateDiscount { gamma_lambda: f64, floor: f64 },

    #[error("step index {index} out of range for a {len}-step log")]
    IndexOutOfRange { index: usize, len: usize },

    /// The diagnostic horizon reaches past the end of the logged trajectory.
    #[error("log has {len} steps but the diagnostic needs {required}")]
    InsufficientLog { required: usize, len: usize },

    #[error("{what} = {value} is outside {domain}")]
    DomainError {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A state key was used with a state-action table or vice versa.
    #[error("key shape does not match table arity {arity:?}")]
    ArityMismatch { arity: Arity },

    #[error("action merit vector is empty")]
    EmptyActionSet,

    /// Advantage updating divides by alpha in its evaluation-function rule.
    #[error("alpha must be positive for advantage updating")]
    DegenerateAlpha,

    /// An environment step was requested from a terminal state.
    #[error("episode already finished")]
    EpisodeFinished,

    /// Fictitious-episode padding was requested for a run that completed.
    #[error("run completed normally, nothing to pad")]
    NothingToPad,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
