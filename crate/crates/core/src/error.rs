use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported number of sites {0} (supported: 1..=5)")]
    UnsupportedSites(usize),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expectation vector is not a state: negative vertex weights {weights}")]
    InfeasibleState { weights: String },
    #[error("state needs local dimension at least {min}, got d = {d}")]
    InvalidAtDimension { d: usize, min: usize },
    #[error("operator side {side} exceeds the dense guard of {limit}")]
    GuardExceeded { side: usize, limit: usize },
    #[error("local dimension d = {d} too small (need d >= {min})")]
    DimensionTooSmall { d: usize, min: usize },
    #[error("operator is not in the permutation span (relative residual {residual:.3e})")]
    NotInSpan { residual: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid hiding specification: {0}")]
    InvalidSpec(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unknown pair {0:?}")]
    UnknownPair(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by the caller's inputs (bad states, bad
    /// parameters, guard violations) as opposed to internal failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}
