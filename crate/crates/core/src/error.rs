use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input arity mismatch: expected {expected} bits, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("cannot remove the only output of a circuit")]
    LastOutput,

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("exhaustive search refused: {n} bits exceeds bound {bound}")]
    SearchBound { n: usize, bound: usize },

    #[error("oracle contract violated: {0}")]
    OracleContract(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{mode} discipline violated at depth {depth}: {detail}")]
    MonitorViolation {
        mode: String,
        depth: usize,
        detail: String,
    },

    #[error("state size overflow: {0}")]
    Sizing(String),

    #[error("position undefined for invalid state")]
    UndefinedPosition,

    #[error("promise violated at index {index}: {detail}")]
    PromiseViolation { index: String, detail: String },

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::Domain(_) | Error::SearchBound { .. } => 3,
            _ => 2,
        }
    }
}
