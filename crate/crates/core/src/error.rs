use thiserror::Error;

/// Domain errors shared by the library and the command-line driver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A set description violates its type invariants or fails to parse.
    #[error("malformed description: {0}")]
    MalformedDescription(String),

    /// A value escaped the unit interval.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A raw automaton failed validation (unreachable or childless state).
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    /// An order failed the dense-without-endpoints check at the given depth.
    #[error("order is not consistent with type eta at depth {depth}: {witness}")]
    NotEta { depth: usize, witness: String },

    /// Truncation depths disagree, so the kernel status of a non-regular
    /// enumeration cannot be trusted yet.
    #[error("depth too small: {0}")]
    DepthTooSmall(String),

    /// An operation requiring a nonempty perfect kernel received an empty one.
    #[error("empty kernel")]
    EmptyKernel,

    /// A word does not label a path of the automaton it was offered to.
    #[error("not a path: {0}")]
    NotAPath(String),
}

impl Error {
    /// Short stable name used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedDescription(_) => "MalformedDescription",
            Error::OutOfRange(_) => "OutOfRange",
            Error::InvalidAutomaton(_) => "InvalidAutomaton",
            Error::NotEta { .. } => "NotEta",
            Error::DepthTooSmall(_) => "DepthTooSmall",
            Error::EmptyKernel => "EmptyKernel",
            Error::NotAPath(_) => "NotAPath",
        }
    }
}
