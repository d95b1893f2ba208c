use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("sign not separated from zero after {max_refinements} refinements")]
    PrecisionExhausted { max_refinements: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not strictly upper triangular")]
    NotStrictUpper,
    #[error("matrix is not unitriangular")]
    NotUnitriangular,
    #[error("matrix is not in affine form (upper triangular, positive diagonal, corner 1)")]
    NotAffineForm,
    #[error("predicate is undefined for the identity element")]
    IdentityInput,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("generator list is not closed under inversion")]
    NotInverseClosed,
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("index spaces differ")]
    IndexSpaceMismatch,
    #[error("right operand of dominance test must be nonzero")]
    ZeroRight,
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("iterated wreath product needs at least one level")]
    EmptyLevels,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("identity {tag} violated: {witness}")]
    IdentityViolation { tag: String, witness: String },
    #[error("parse error: {0}")]
    Parse(String),
}
