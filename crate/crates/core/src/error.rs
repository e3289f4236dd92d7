use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("experiment produced no trials within the horizon")]
    NoTrials,
    #[error("no trajectory reached the minimum of {n_min} trials")]
    EmptyEnsemble { n_min: usize },
    #[error("outcome index {index} out of range for {n_outcomes} outcomes")]
    OutcomeOutOfRange { index: usize, n_outcomes: usize },
    #[error("measure has non-positive or non-finite total mass {0}")]
    DegenerateMeasure(f64),
    #[error("boundary map undefined on {undefined} of {total} samples")]
    MapUndefined { undefined: usize, total: usize },
    #[error("bit sequence exhausted after {0} steps")]
    PrecisionExhausted(usize),
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("no stationary decay vertex: {0}")]
    NoSolution(String),
    #[error("stationary point is not a minimum (smallest Hessian eigenvalue {0})")]
    NotAMinimum(f64),
    #[error("field vanishes; spin alignment is unconstrained")]
    NoAlignment,
    #[error("conditioning setting has zero measure")]
    UnconditionedSetting,
    #[error("trajectory absorbed by the wire")]
    Absorbed,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid argument: {0}")]
    Domain(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
