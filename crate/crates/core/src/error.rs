//! Crate-wide error type.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by construction, validation and iteration routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Two product points (or a point and a system) disagree on the number
    /// of components or on a component dimension.
    #[error("dimension profile mismatch: {0}")]
    ProfileMismatch(String),

    /// A component index is outside `0..order`.
    #[error("component index {index} out of range for a system of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A comparison-function argument was negative, or a candidate function
    /// failed the sampled admissibility checks.
    #[error("comparison function rejected: {0}")]
    ComparisonFunctionRejected(String),

    /// An operator produced NaN or an infinity.
    #[error("operator {operator} returned a non-finite value in entry {entry}")]
    NonFiniteValue { operator: usize, entry: usize },

    /// An operator returned a vector of the wrong length.
    #[error("operator {operator} returned {got} entries, expected {expected}")]
    OperatorDimension {
        operator: usize,
        expected: usize,
        got: usize,
    },

    /// A sampling box has zero width in some entry, so no pair of distinct
    /// points can be drawn from it.
    #[error("degenerate sampling region: component {component} entry {entry} has zero width")]
    DegenerateRegion { component: usize, entry: usize },

    /// The sampled monotonicity check contradicted the declared signature.
    #[error(
        "declared monotonicity violated by operator {operator} in variable {variable}: {detail}"
    )]
    MonotonicityViolation {
        operator: usize,
        variable: usize,
        detail: String,
    },

    /// A precondition on starting data was not met.
    #[error("coupled bounds not satisfied: {0}")]
    BoundsNotSatisfied(String),

    /// The sampled contraction check found counterexamples, so the solver's
    /// convergence guarantee does not apply.
    #[error(
        "contraction check failed on {violations} of {samples} sampled pairs \
         (largest ratio {max_ratio})"
    )]
    ContractionUncertified {
        violations: usize,
        samples: usize,
        max_ratio: f64,
    },
}
