use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("circuit requests {requested} qubits, simulator is capped at {cap}")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("qubit-count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate targets and controls must be disjoint and in range")]
    BadGateWiring,
    #[error("Pauli string '{0}' is invalid (alphabet I/X/Y/Z, length must match targets)")]
    BadPauliString(String),
    #[error("slot index {slot} exceeds declared {kind} slot count {count}")]
    SlotOutOfRange {
        kind: &'static str,
        slot: usize,
        count: usize,
    },
    #[error("parametric gate bound without an angle")]
    MissingAngle,
    #[error("{0}")]
    InvalidModel(String),
    #[error("mapping precondition violated: {0}")]
    Unmappable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("training diverged at step {step} (loss {loss:.3e})")]
    Diverged { step: usize, loss: f64 },
    #[error("IDX parse error at offset {offset}: {reason}")]
    IdxParse { offset: usize, reason: String },
    #[error("zero-variance component {0} cannot be normalized")]
    ZeroVariance(usize),
    #[error("pool exhausted: need {need} samples, have {have}")]
    PoolExhausted { need: usize, have: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
