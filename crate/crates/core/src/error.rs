use thiserror::Error;

/// Errors surfaced by constructors, parsers, and verification drivers.
///
/// Low-level arithmetic (permutation composition, vector addition) panics on
/// contract violations such as degree mismatches; those are programmer errors,
/// not recoverable conditions.
#[derive(Error, Debug)]
pub enum CoreError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid permutation: {0}")]
    InvalidPerm(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty verification domain")]
    EmptyDomain,

    #[error("domain too large: {0} elements (cap {1})")]
    DomainTooLarge(u128, u128),

    #[error("degree {0} exceeds the enumeration limit {1}")]
    DegreeTooLarge(usize, usize),

    #[error("map is not bijective: {0}")]
    NonBijective(String),

    #[error("a structure-group vector is paired with two distinct permutations: {0}")]
    NotSingleValued(String),

    #[error("check `{check}` failed: {detail}")]
    CheckFailed { check: String, detail: String },
}

impl CoreError {
    pub fn check_failed(check: &str, detail: impl Into<String>) -> Self {
        CoreError::CheckFailed {
            check: check.to_string(),
            detail: detail.into(),
        }
    }
}
