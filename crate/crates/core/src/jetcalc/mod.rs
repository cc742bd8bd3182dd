//! Exact calculus of scalar fields on the chart with coordinates x, y, z.
//!
//! Every derivative used by the engine comes from symbolic differentiation
//! of the expression tree. Finite differences appear only in
//! [`finite_difference_oracle`], which tests use as an independent check.

mod expr;
mod jet;
mod parse;

pub use expr::{derive, finite_difference_oracle, Expr, Point, ScalarField, Tape, DIVISION_GUARD};
pub use jet::{monomial_index, Jet, MONOMIALS};
pub use parse::{parse_expression, parse_expression_with};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("denominator {value:e} is below the division guard")]
    NearZeroDenominator { value: f64 },
    #[error("square root of non-positive value {value:e}")]
    NonPositiveSqrt { value: f64 },
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected '{expected}', found {found:?}")]
    Expected { expected: char, found: Option<char> },
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("malformed number '{0}'")]
    BadNumber(String),
    #[error("exponent must be an integer literal")]
    NonIntegerExponent,
}
