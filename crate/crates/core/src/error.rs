use thiserror::Error;

/// Errors raised by the library.
///
/// Hypothesis failures of conditional results are usually reported as
/// "not applicable" values instead; the variants here cover precondition
/// violations and numerical breakdown.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("shift {shift} is within {distance:e} of the spectrum of {what}")]
    SingularShift {
        what: &'static str,
        shift: f64,
        distance: f64,
    },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("no spectrum above max σ(C) = {c}")]
    EmptyLandmarks { c: f64 },

    #[error("window endpoint {alpha} is within {distance:e} of an eigenvalue")]
    Boundary { alpha: f64, distance: f64 },

    #[error("subspace is not a graph over the first component (σ_min(U) = {sigma_min:e})")]
    NotAGraph { sigma_min: f64 },

    #[error("eigenvalue {lambda} is not isolated (gap {gap:e})")]
    DegenerateGap { lambda: f64, gap: f64 },

    #[error("projection of x_{index} onto its paired eigenvector of A vanishes")]
    PairingFailure { index: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid profile: {0}")]
    Profile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
