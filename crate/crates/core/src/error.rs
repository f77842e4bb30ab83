use thiserror::Error;

/// Errors surfaced by every layer of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(u32, u32),
    #[error("operands use different backends (symbolic vs dense)")]
    BackendMismatch,
    #[error("operator is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not anti-Hermitian (residual {0:.3e})")]
    NotAntiHermitian(f64),
    #[error("operator is not traceless (|trace| = {0:.3e})")]
    NotTraceless(f64),
    #[error("operator is numerically zero")]
    ZeroOperator,
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("dense backend cap exceeded: {0} qubits > cap of {1}")]
    DenseCapExceeded(u32, u32),
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("tolerance policy invalid: {0}")]
    InvalidTolerance(String),
    #[error("spectrum invalid: {0}")]
    InvalidSpectrum(String),
    #[error("operator is sign-ambiguous: eigenvalues {0:.6} and {1:.6} cancel")]
    SignAmbiguous(f64, f64),
    #[error("square is not a scalar multiple of the identity")]
    SquareNotScalar,
    #[error("power-span system structurally singular: zero eigenvalue with positive offset")]
    StructurallySingular,
    #[error("closure was capped; rerun with larger caps for a complete basis")]
    CappedBasis,
    #[error("generator {0} is not a single Pauli term")]
    NotSingleTerm(usize),
    #[error("invalid Pauli string: {0}")]
    InvalidPauliString(String),
    #[error("invalid generator subset: {0}")]
    InvalidSubset(String),
    #[error("graph invalid: {0}")]
    InvalidGraph(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("malformed commutator tree: {0}")]
    MalformedTree(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
