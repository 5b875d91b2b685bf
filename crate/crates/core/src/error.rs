use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register size mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid Pauli symbol {0:?}")]
    InvalidSymbol(char),
    #[error("Pauli sum has no terms to average")]
    EmptySum,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("operator combination is empty")]
    EmptyCombination,
    #[error("{n} qubits exceeds the dense-matrix cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("linear solve residual {residual:e} exceeds abort threshold {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("shot count must be positive")]
    ZeroShots,
    #[error("operator chain is not unitary (output norm {0})")]
    NonUnitary(f64),
    #[error("no trajectory for right-hand string {0}")]
    MissingTrajectory(String),
    #[error("symmetry property violated: {0}")]
    SymmetryViolated(String),
    #[error("proposition check failed: {0}")]
    PropositionFailed(String),
    #[error("{0} is not a column of the sign table")]
    NotInTable(String),
    #[error("identity string has no exponential circuit")]
    ZeroWeight,
    #[error("average Pauli weight {0} must exceed 1")]
    WeightTooSmall(f64),
    #[error("energy shift {shift} exceeds spectral span {span}")]
    ShiftExceedsGrid { shift: f64, span: f64 },
    #[error("series mismatch: {0}")]
    SeriesMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
