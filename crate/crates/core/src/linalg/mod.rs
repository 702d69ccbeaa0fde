//! Exact integer and rational linear algebra.
//!
//! Every quantity in this crate is exact. Matrix entries are `i64`; all
//! intermediate arithmetic is carried out in `i128` with checked operations,
//! so an overflow surfaces as [`LinalgError::Overflow`] instead of a wrong
//! answer. Smith transforms, whose entries grow quickly, use big integers.

mod cokernel;
mod matrix;
pub mod rational;
mod smith;

pub use cokernel::{CokernelClass, CokernelPresentation};
pub use matrix::{IntMatrix, RationalMatrix};
pub use rational::Rational;
pub use smith::{big_mul, to_big, BigMatrix, SmithDecomposition};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("ragged row data")]
    Ragged,
}

pub type Result<T, E = LinalgError> = std::result::Result<T, E>;

pub(crate) fn checked(value: Option<i128>) -> Result<i128> {
    value.ok_or(LinalgError::Overflow)
}

pub(crate) fn narrow(value: i128) -> Result<i64> {
    i64::try_from(value).map_err(|_| LinalgError::Overflow)
}

/// Largest `s` with `s * s <= n`, for `n >= 0`.
pub fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n.max(0);
    }
    num_integer::Roots::sqrt(&n)
}

/// `Some(root)` when `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let s = isqrt(n);
    (s * s == n).then_some(s)
}
