use thiserror::Error;

/// Errors produced by `fqe-core`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("Pauli strings are limited to {max} qubits, got {found}")]
    PauliWidth { max: usize, found: usize },

    #[error("complex coefficient {re}{im:+}i: Pauli expansions of Hermitian operators must be real")]
    ComplexCoefficient { re: f64, im: f64 },

    #[error("learning rate must be positive, got {0}")]
    InvalidGamma(f64),

    #[error("{n} qubits exceeds the dense-matrix cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    #[error("integral table violates symmetry: {0}")]
    Symmetry(String),

    #[error("operator is not Hermitian (residual imaginary part {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("{electrons} electrons do not fit in {qubits} spin-orbitals")]
    TooManyElectrons { electrons: usize, qubits: usize },

    #[error("operator has no terms")]
    ZeroOperator,

    #[error("operator annihilates the state (zero-norm branch)")]
    ZeroNorm,

    #[error("contraction ratio {ratio} >= 1: no convergence guarantee (degenerate leading eigenvalues)")]
    NoContraction { ratio: f64 },

    #[error("start state has zero overlap with the ground state")]
    ZeroOverlap,

    #[error("unperturbed ground level is degenerate within {tol:e}")]
    DegenerateGround { tol: f64 },

    #[error("{skipped} of {total} perturbation terms had degenerate denominators")]
    SkipBudget { skipped: usize, total: usize },

    #[error("operator contains non-diagonal (X/Y) terms")]
    NotDiagonal,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Format(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error stems from user input rather than an internal
    /// invariant of the simulator.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonHermitian { .. } | Error::NotNormalized { .. } | Error::QubitMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
