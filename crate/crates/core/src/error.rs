use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected} qubits, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid Pauli character {found:?} at position {position}")]
    PauliParse { position: usize, found: char },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("Hamiltonian has no non-identity terms (identity offset {identity_offset})")]
    EmptyHamiltonian { identity_offset: f64 },

    #[error("{parameter} = {value} is outside {range}")]
    Domain {
        parameter: &'static str,
        value: f64,
        range: String,
    },

    #[error("tail bound undefined: term {index} has no compatible measurement; truncate it first")]
    BoundUndefined { index: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{what} needs n <= {cap} qubits, got n = {n}")]
    ResourceCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("estimation with the {0} indicator is not supported")]
    UnsupportedEstimation(&'static str),

    #[error("eigensolver did not converge: residual {residual:e} > tolerance {tolerance:e}")]
    NonConvergence { residual: f64, tolerance: f64 },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
