use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range {min}..={max}", min = crate::statevector::MIN_QUBITS, max = crate::statevector::MAX_QUBITS)]
    QubitCount(usize),
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndex { index: usize, num_qubits: usize },
    #[error("site {site} out of range 1..={num_qubits}")]
    Site { site: usize, num_qubits: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("amplitude vector length {len} does not match 2^{num_qubits}")]
    Length { len: usize, num_qubits: usize },
    #[error("solution set is empty")]
    EmptySolutions,
    #[error("duplicate solution {0}")]
    DuplicateSolution(usize),
    #[error("{m} solutions out of {n} is classically easy (need 4M < N)")]
    ClassicallyEasy { m: usize, n: usize },
    #[error("iteration count {k} outside 0..={r}")]
    Iteration { k: usize, r: usize },
    #[error("need at least {need} distinct sizes, got {got}")]
    TooFewSizes { need: usize, got: usize },
    #[error("e_max must be positive, got {0}")]
    NonPositiveEmax(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("probe failed at step {step}: {msg}")]
    Probe { step: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
