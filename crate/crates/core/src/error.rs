use thiserror::Error;

/// Errors produced by construction, lookup and measure operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input: bad construction arguments, schema violations,
    /// unknown variables, invalid budgets.
    #[error("input error: {0}")]
    Input(String),

    /// Conditioning evidence that no tuple of the relation realizes.
    /// Conditional ranges are only defined on realizable evidence, so this
    /// is distinct from an empty-set return.
    #[error("incompatible evidence: {0}")]
    IncompatibleEvidence(String),

    /// A brute-force search would exceed the configured cap.
    #[error("search cap exceeded: {what} has size {size}, cap is {cap}; raise the cap explicitly to proceed")]
    SearchCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn evidence(msg: impl Into<String>) -> Self {
        Error::IncompatibleEvidence(msg.into())
    }
}
