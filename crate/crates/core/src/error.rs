use thiserror::Error;

/// Errors produced anywhere in the eigensolver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("qubit {qubit} appears more than once in a single term")]
    DuplicateQubit { qubit: usize },

    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),

    #[error("{n_qubits} qubits exceeds the dense-matrix cap of {cap}")]
    DimensionCap { n_qubits: usize, cap: usize },

    #[error("bitstring length {got} does not match {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid bitstring {0:?}: expected only '0' and '1'")]
    InvalidBitString(String),

    #[error("reference specification is empty")]
    EmptyReference,

    #[error("reference amplitudes have zero norm")]
    ZeroNorm,

    #[error("state norm {0} is not 1")]
    NotNormalized(f64),

    #[error("state has {got} amplitudes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("time must be finite, got {0}")]
    NonFiniteTime(f64),

    #[error("invalid sampling parameter: {0}")]
    InvalidPlan(String),

    #[error("requested interval {requested} exceeds the Nyquist limit {max_interval} (pi / {energy_bound})")]
    NyquistViolation {
        requested: f64,
        max_interval: f64,
        energy_bound: f64,
    },

    #[error("signal length {0} is even; the transform requires an odd number of samples")]
    EvenLength(usize),

    #[error("offset {s0} is below the resolvable minimum {minimum} (2 x frequency bin)")]
    OffsetBelowResolution { s0: f64, minimum: f64 },

    #[error("malformed signal data: {0}")]
    MalformedSignal(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
