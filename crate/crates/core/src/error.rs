use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero in {0}")]
    DivisionByZero(String),

    /// A denominator factor vanished (Exact) or fell below the pole floor (Float).
    #[error("pole: {0}")]
    Pole(String),

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("no convergence after {terms} terms: {reason}")]
    NoConvergence { terms: usize, reason: String },

    #[error("infinite summation domain cannot be iterated directly")]
    InfiniteDomain,

    #[error("index {index} outside table window {lo}..={hi}")]
    Range { index: i64, lo: i64, hi: i64 },

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parameter sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),

    #[error("mismatch at {at}: residual {residual}")]
    ReportedMismatch { at: String, residual: String },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
