use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("zero vector not allowed here")]
    ZeroVector,
    #[error("basis is rank deficient")]
    RankDeficient,
    #[error("imaginary part must be positive, got {0}")]
    NonPositiveImaginary(f64),
    #[error("fundamental-domain reduction did not terminate within {0} steps")]
    ReductionOverflow(usize),
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("invalid measure specification: {0}")]
    BadMeasureSpec(String),
    #[error("line does not meet the lattice plane rationally")]
    LineOutsidePlane,
    #[error("plane is not on the isotropic circle")]
    NotIsotropic,
    #[error("vector is not a lattice member")]
    NotInLattice,
    #[error("vector is not primitive in the lattice")]
    NotPrimitive,
    #[error("polynomial rejected: {0}")]
    BadPolynomial(String),
    #[error("numerical failure at step {step}: {what}")]
    NumericalFailure { step: u64, what: String },
    #[error("report too small: {got} samples where {need} are required")]
    Undersampled { got: usize, need: usize },
    #[error("equivariance identity failed at t = {0}")]
    EquivarianceFailure(String),
    #[error("duality identity failed")]
    DualityFailure,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
