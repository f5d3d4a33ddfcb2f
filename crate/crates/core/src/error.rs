//! Error type shared by every subsystem.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("variable index {index} out of range for {num_vars} variables")]
    VarIndexOutOfRange { index: usize, num_vars: usize },
    #[error("evaluation point has length {got}, expected {expected}")]
    PointLengthMismatch { got: usize, expected: usize },
    #[error("substitution supplies {got} images, expected {expected}")]
    SubstitutionLengthMismatch { got: usize, expected: usize },
    #[error("potential depends on v")]
    PotentialDependsOnV,
    #[error("screen dimension must be at least 1")]
    BadDimension,
    #[error("matrix is not orthogonal (checked {0})")]
    NotOrthogonal(String),
    #[error("polynomial must depend on u only")]
    NotAFunctionOfU,
    #[error("Weyl tensor needs screen dimension n >= 2, got n = {0}")]
    DimensionTooSmallForWeyl(usize),
    #[error("metric is not two-symmetric")]
    NotTwoSymmetric,
    #[error("eigensolver failed to converge")]
    DegenerateEigenproblem,
    #[error("canonical form invalid: {0}")]
    NotCanonical(String),
    #[error("metric is not locally symmetric")]
    NotSymmetric,
    #[error("generator matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("exact operation refuses numeric (floating point) input")]
    ExactnessRequired,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
