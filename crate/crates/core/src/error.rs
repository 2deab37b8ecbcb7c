use std::fmt;

use num_bigint::BigInt;

/// Errors raised by every module of the crate.
///
/// [`Error::Indeterminate`] is kept apart from the other domain errors because
/// callers (the CLI in particular) report it with its own exit status.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("logarithm of a non-positive number")]
    NonPositiveLog,
    #[error("comparison undecided at {precision_bits} bits: {detail}")]
    Indeterminate { precision_bits: u32, detail: String },
    #[error("{0} is not a valid field discriminant radicand (need squarefree d != 0, 1)")]
    BadRadicand(i64),
    #[error("elements or ideals belong to different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero is not allowed here")]
    ZeroInput,
    #[error("element is not an algebraic integer")]
    NotIntegral,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("cannot factor {0}: cofactor exceeds 2^128")]
    FactorizationTooLarge(BigInt),
    #[error("invalid HNF [{a}, {b}+{c}*w]: {why}")]
    BadHnf {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        why: &'static str,
    },
    #[error("product of the parts is not contained in the ideal: {0}")]
    NotContained(ValuationMismatch),
    #[error("ideal {0} is not principal")]
    NotPrincipal(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("field {0} is not balanced")]
    Unbalanced(String),
    #[error("inconsistent factorization data: {0}")]
    Inconsistent(String),
    #[error("unit input is not supported: {0}")]
    UnitInput(String),
    #[error("search limit exceeded: {0}")]
    SearchLimit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// The prime at which a containment precondition fails, with both valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationMismatch {
    pub prime: String,
    pub in_ideal: i64,
    pub in_product: i64,
}

impl fmt::Display for ValuationMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at {} the ideal has valuation {} but the product only {}",
            self.prime, self.in_ideal, self.in_product
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
