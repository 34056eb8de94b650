use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular Gram matrix")]
    DegenerateLattice,
    #[error("Gram matrix has an odd diagonal entry")]
    NotEven,
    #[error("lattice is not positive definite")]
    NotDefinite,
    #[error("quadratic form is degenerate: {0}")]
    DegenerateForm(String),
    #[error("no canonical representative x_c for c = {0}")]
    CanonicalRepUnavailable(i64),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("{0} is not coprime to the level {1}")]
    NotCoprime(i64, i64),
    #[error("operation needs an even signature, got {0}")]
    OddSignature(i64),
    #[error("malformed generator word: {0}")]
    MalformedWord(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix is not in the double coset of diag(l^2, 1): {0}")]
    NotInDoubleCoset(String),
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("bad precision: {0}")]
    BadPrecision(String),
    #[error("genus fixture has no classes")]
    EmptyGenus,
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    TailTooLarge { tail: f64, tol: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
