//! Error type shared across the crate.
//!
//! Contract violations that can only arise from buggy callers (context
//! mismatch between two series, non-group-like operands) panic instead;
//! the variants here are the failures a correct caller can run into.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator index {index} out of range 1..={t}")]
    GeneratorOutOfRange { index: usize, t: usize },

    #[error("truncation context too large: {monomials} monomials exceed the supported maximum")]
    ContextTooLarge { monomials: u128 },

    #[error("invalid context parameters: t = {t}, k = {k} (both must be >= 1)")]
    InvalidContext { t: usize, k: usize },

    #[error("homogeneous slice carries a monomial of degree {found}, expected {expected}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("slice is not an integer combination of basic Lie elements of weight {weight}")]
    NotInLieLattice { weight: usize },

    #[error("row lattice of the denominator is not contained in the numerator")]
    ContainmentViolation,

    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),

    #[error("invalid cyclic orders: {0}")]
    InvalidOrders(String),

    #[error("depth k = {k} too small: need k >= {min} for class c = {c}")]
    DepthTooSmall { k: usize, min: usize, c: usize },

    #[error("orders are not mutually coprime: gcd({a}, {b}) > 1")]
    NotCoprime { a: u64, b: u64 },

    #[error("invariant factors are not canonical: {0}")]
    NonCanonicalGroup(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
