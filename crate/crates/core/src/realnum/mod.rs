//! Directed-rounding interval arithmetic for logarithms of algebraic reals.

mod dyadic;
mod expr;
mod interval;

pub use dyadic::{Dyadic, Round};
pub use expr::{
    compare_adaptive, compare_with, eval_log_expr, surd_sign, CompareConfig, Comparison,
    LogExpr, PositiveReal, DEFAULT_TIE_TOLERANCE, MAX_PRECISION, START_PRECISION,
};
pub use interval::{ln2, RealInterval};
