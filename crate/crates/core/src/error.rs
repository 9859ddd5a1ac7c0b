use crate::submeasure::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid prefix: {0}")]
    InvalidPrefix(String),
    #[error("coordinate {coordinate} lies beyond depth {depth}")]
    DepthTooShallow { depth: usize, coordinate: usize },
    #[error("depth {depth} needs {leaves} leaves, above the cap of {cap}")]
    DepthCap { depth: usize, leaves: u128, cap: usize },
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("table violates the submeasure axioms ({} violations)", .0.len())]
    NotSubmeasure(Vec<Violation>),
    #[error("weight comparison undecided at {bits} bits of precision")]
    Undecided { bits: u64 },
}

impl Error {
    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPrefix(_) => "invalid-prefix",
            Error::DepthTooShallow { .. } => "depth-too-shallow",
            Error::DepthCap { .. } => "depth-cap",
            Error::SizeCap(_) => "size-cap",
            Error::Infeasible(_) => "infeasible",
            Error::Format(_) => "format",
            Error::Precondition(_) => "precondition",
            Error::Range(_) => "range",
            Error::NotSubmeasure(_) => "not-submeasure",
            Error::Undecided { .. } => "undecided",
        }
    }
}
