use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("map is not completely positive (min Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),
    #[error("invalid subalgebra embedding: {0}")]
    InvalidEmbedding(String),
    #[error("element must be nonzero (norm {0:e})")]
    ZeroElement(f64),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl ToString,
        found: impl ToString,
    ) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
