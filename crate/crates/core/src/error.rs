use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

/// Errors raised by the laboratory routines.
///
/// Variants fall into two families: precondition violations (bad input, a
/// contract the caller broke) and numerical verdicts that cannot be decided at
/// the working tolerance. The CLI maps the former to exit code 2 and the
/// latter to exit code 3; see [`LabError::is_borderline`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular matrix")]
    Singular,

    #[error("borderline classification (|tr| - 2 = {gap:e}); candidates: {candidates:?}")]
    Borderline { gap: f64, candidates: Vec<String> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("set is not closed under multiplication: {0}")]
    NotClosed(String),

    #[error("enumeration cap of {cap} elements exceeded")]
    CapExceeded { cap: usize },

    #[error("not discrete at this tolerance: {0}")]
    NotDiscrete(String),

    #[error("isometries do not commute: {0}")]
    NotCommuting(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("polygon is not hyperbolic: angle sum {angle_sum} >= {bound}")]
    NotHyperbolic { angle_sum: f64, bound: f64 },

    #[error("complex is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("no limit at tolerance {tol:e}: {witness}")]
    NoLimit { tol: f64, witness: String },

    #[error("sequence element {index} rejected: {reason}")]
    Rejected { index: usize, reason: String },

    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),

    #[error("unresolved at this word-ball radius, increase L: {0}")]
    Unresolved(String),

    #[error("empty input: {0}")]
    Empty(String),
}

impl LabError {
    /// Whether the error reports a numerically undecidable outcome rather than
    /// a broken contract.
    pub fn is_borderline(&self) -> bool {
        matches!(self, LabError::Borderline { .. } | LabError::NoLimit { .. } | LabError::Unresolved(_))
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        LabError::Precondition(msg.into())
    }
}
