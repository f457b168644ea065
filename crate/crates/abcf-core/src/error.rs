//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by expansion, attractor, coding, and measure routines.
///
/// Each variant carries a human-readable payload naming the operation and the
/// offending value, so callers can surface the message directly.
#[derive(Debug, Error)]
pub enum AbcfError {
    /// A surd was constructed with denominator zero.
    #[error("invalid denominator: {0}")]
    InvalidDenominator(String),

    /// Arithmetic mixed two distinct irrational quadratic fields.
    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    /// The two-parameter floor was applied to the point at infinity.
    #[error("undefined floor: {0}")]
    UndefinedFloor(String),

    /// An input fell outside the domain an operation requires.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Fewer digits were available than an operation asked for.
    #[error("digit underflow: {0}")]
    DigitUnderflow(String),

    /// A digit sequence violates the convergence side conditions.
    #[error("nonconvergent sequence: {0}")]
    NonconvergentSequence(String),

    /// A geodesic was given with equal endpoints.
    #[error("degenerate geodesic: {0}")]
    DegenerateGeodesic(String),

    /// The orbit budget ran out before the boundary orbits closed up.
    #[error("finiteness undetected: {0}")]
    FinitenessUndetected(String),

    /// Parameters fail the preconditions of a closed-form construction.
    #[error("case mismatch: {0}")]
    CaseMismatch(String),

    /// A cell image straddles a cell boundary, so no finite transition
    /// matrix is exact for this partition.
    #[error("not markov: {0}")]
    NotMarkov(String),

    /// The invariant measure has no finite normalizer (a = 0 or b = 0).
    #[error("infinite measure: {0}")]
    InfiniteMeasure(String),

    /// The integrand is singular on the given rectangle.
    #[error("singular rectangle: {0}")]
    SingularRectangle(String),

    /// An evaluation point sits too close to a discontinuity.
    #[error("ill-conditioned point: {0}")]
    IllConditionedPoint(String),

    /// Single-step expansivity fails; an iterate-based check is needed.
    #[error("use iterate check: {0}")]
    UseIterateCheck(String),

    /// A float orbit collapsed onto a rational point.
    #[error("rational input: {0}")]
    RationalInput(String),

    /// No candidate digit inverts the point back into the attractor.
    #[error("inversion failed: {0}")]
    InversionFailed(String),

    /// More than one candidate digit inverts the point (boundary case).
    #[error("ambiguous boundary: {0}")]
    AmbiguousBoundary(String),

    /// No exact construction covers these parameters.
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    /// The reduction loop did not land in the attractor within budget.
    #[error("reduction failed: {0}")]
    ReductionFailed(String),

    /// The digit stream ended (endpoint at infinity or orbit terminated).
    #[error("expansion exhausted: {0}")]
    ExpansionExhausted(String),

    /// Inputs fall outside the validity region of a closed formula.
    #[error("formula domain error: {0}")]
    FormulaDomainError(String),

    /// A digit sequence is structurally invalid (zero digit past the head).
    #[error("malformed sequence: {0}")]
    MalformedSequence(String),

    /// A domain failed an internal consistency cross-check.
    #[error("inconsistent domain: {0}")]
    InconsistentDomain(String),

    /// A number literal could not be parsed.
    #[error("parse error: {0}")]
    ParseError(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, AbcfError>;
