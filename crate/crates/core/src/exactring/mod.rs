//! Exact rational polynomial and jet arithmetic.

mod base;
mod matrix;
mod monomial;
mod parse;
mod rational;

pub use base::{int, rat, BaseElement, BaseRing, Mode, Rational, ZeroCheck};
pub use matrix::{rational_inverse, Matrix};
pub use monomial::{Monomial, MAX_VARS};
pub use parse::poly_parse;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("series inverse is only available in jet mode")]
    PolynomialInverse,
    #[error("element has zero constant term and is not invertible")]
    ZeroConstantTerm,
    #[error("constant term of the matrix is singular")]
    SingularConstantTerm,
    #[error("matrix has no polynomial inverse (determinant is not a nonzero constant)")]
    NoPolynomialInverse,
    #[error("shape error: {0}")]
    Shape(String),
}

/// Binary ring operation selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

pub fn ring_arith(a: &BaseElement, b: &BaseElement, op: RingOp) -> Result<BaseElement, RingError> {
    match op {
        RingOp::Add => a.checked_add(b),
        RingOp::Sub => a.checked_sub(b),
        RingOp::Mul => a.checked_mul(b),
    }
}

pub fn series_invert(a: &BaseElement) -> Result<BaseElement, RingError> {
    a.series_invert()
}

pub fn matrix_invert(p: &Matrix) -> Result<Matrix, RingError> {
    p.invert()
}
