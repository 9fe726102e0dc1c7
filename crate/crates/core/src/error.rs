use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("place index {index} out of range 1..={max}")]
    PlaceOutOfRange { index: usize, max: usize },

    #[error("place {0} is definite; use the complex embedding")]
    DefinitePlace(usize),

    #[error("objects belong to different fields")]
    MismatchedField,

    #[error("objects belong to different quaternion algebras")]
    MismatchedAlgebra,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("basis does not span an ideal: {0}")]
    NotIdeal(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("Z[w] is not maximal at {0}; refusing to factor")]
    IndexDivisor(u64),

    #[error("budget exceeded: {needed} > {budget} ({what})")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance: achieved {achieved:e}, required {required:e}")]
    Quadrature { achieved: f64, required: f64 },

    #[error("eigenspace separation failed: {0}")]
    Separation(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
