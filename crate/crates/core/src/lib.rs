//! Exact engine for pp-wave metrics `2 du dv + Σ (dx^i)² + H(x, u) du²`
//! with polynomial potential.
//!
//! The crate computes the curvature tensor and its first two covariant
//! derivatives in closed form, classifies metrics by symmetry order
//! (flat / locally symmetric / two-symmetric / neither), reduces
//! two-symmetric metrics to the normal form `(λ_i δ_ij u + F_ij) x^i x^j`
//! and decides isometry equivalence of normal forms. A companion
//! linear-algebra subsystem realizes spaces of algebraic curvature tensors
//! for subalgebras of the similitude algebra and computes annihilators
//! under the natural Lie-algebra action.
//!
//! The scalar type is generic: every algebraic structure takes any
//! [`scalar::Scalar`]. Exact work uses arbitrary-precision rationals so
//! that the classification predicates are decisive zero tests; a floating
//! mirror of the same structures backs the numeric paths (orthogonal
//! diagonalization, tolerance checks). The aliases below fix the two
//! instantiations used throughout.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod scalar;
pub mod poly;
pub mod linalg;
pub mod metric;
pub mod transform;
pub mod tensor;
pub mod curvature;
pub mod classify;
pub mod canonical;
pub mod algebra;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Exact multivariate polynomial over the rationals, the universal scalar
/// field of the engine.
pub type Poly = poly::Polynomial<Rational>;
/// Floating-point mirror of [`Poly`]; exact predicates refuse it.
pub type NumericPoly = poly::Polynomial<f64>;
/// Exact pp-wave metric.
pub type ExactMetric = metric::PpWaveMetric<Rational>;
/// Floating-point pp-wave metric.
pub type NumericMetric = metric::PpWaveMetric<f64>;
/// Exact covariant tensor in the standard coframe.
pub type ExactTensor = tensor::CovariantTensor<Rational>;
/// Floating-point covariant tensor.
pub type NumericTensor = tensor::CovariantTensor<f64>;
/// Exact adapted coordinate change (signed permutations and rational
/// orthogonal matrices).
pub type ExactTransformation = transform::AdaptedTransformation<Rational>;
/// Floating-point adapted coordinate change (general orthogonal matrices).
pub type NumericTransformation = transform::AdaptedTransformation<f64>;
