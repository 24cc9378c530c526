use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: malformed coefficient {token:?}")]
    BadCoefficient { line: usize, token: String },

    #[error("line {line}: invalid Pauli character {found:?} (expected one of I, X, Y, Z)")]
    BadPauli { line: usize, found: char },

    #[error("line {line}: Pauli string has length {found}, expected {expected}")]
    LengthMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: expected `<coefficient> <pauli-string>`")]
    MalformedLine { line: usize },

    #[error("Hamiltonian has no terms")]
    EmptyHamiltonian,

    #[error("{what}: {n} qubits exceeds the limit of {limit}")]
    TooManyQubits {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("qubit count must be at least {min}, got {n}")]
    TooFewQubits { n: usize, min: usize },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("expected {expected} values, got {found}")]
    LengthError { expected: usize, found: usize },

    #[error("unsupported gate {0} for this transformation")]
    UnsupportedGate(&'static str),

    #[error("requested {requested} gates of type {kind}, only {available} available")]
    NotEnoughGates {
        kind: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("optimization diverged at epoch {epoch}: energy {energy}")]
    Diverged { epoch: usize, energy: f64 },

    #[error("circuit text line {line}: {msg}")]
    CircuitParse { line: usize, msg: String },
}
