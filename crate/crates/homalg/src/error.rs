use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum HomalgError {
    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("not a complex: d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i64 },

    #[error("not a chain map: compatibility fails at degree {degree}")]
    NotAChainMap { degree: i64 },

    #[error("containment violated: {0}")]
    Containment(String),

    #[error("order violated: expected {0} ≤ {1}")]
    Order(i64, i64),

    #[error("inhomogeneous element: {0}")]
    Grading(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, HomalgError>;
