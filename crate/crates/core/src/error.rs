use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("empty instance: every set was removed by normalization")]
    EmptyInstance,
    #[error("instance spans only a {span}-dimensional subspace of F_q^{k}; restrict to the span first")]
    NonSpanning { span: usize, k: usize },
    #[error("code generator matrix has rank {rank} < {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("incompatible instances: {0}")]
    Incompatible(String),
    #[error("axiom violation: {0}")]
    AxiomViolation(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
