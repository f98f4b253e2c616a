use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius must be at least 1")]
    ZeroRadius,

    #[error("radius {radius} outside supported range 1..={max}")]
    RadiusOutOfRange { radius: usize, max: usize },

    #[error("window has length {found}, expected {expected}")]
    WindowLength { expected: usize, found: usize },

    #[error("the all-zero word is outside the domain of the update map")]
    NullWord,

    #[error("invalid bit {0:?}; expected 0 or 1")]
    InvalidBit(char),

    #[error("step scan exceeded {bound} sites{}", at_time.map(|t| format!(" at time {t}")).unwrap_or_default())]
    StepDiverged { bound: usize, at_time: Option<usize> },

    #[error("invalid particle: {0}")]
    InvalidParticle(String),

    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("blocks starting at {control} and {target} (length {len}) overlap")]
    OverlappingBlocks { control: usize, target: usize, len: usize },

    #[error("block length must be positive")]
    EmptyBlock,

    #[error("state has {found} qubits, expected {expected}")]
    QubitCountMismatch { expected: usize, found: usize },

    #[error("amplitude vector has length {found}, expected {expected}")]
    AmplitudeLength { expected: usize, found: usize },

    #[error("{n_qubits} qubits exceeds the dense limit of {limit}")]
    DimensionTooLarge { n_qubits: usize, limit: usize },

    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
