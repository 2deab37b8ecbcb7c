use std::fmt;
use std::ops;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dyadic::Dyadic;
use super::interval::RealInterval;
use crate::error::{Error, Result};

/// Sign of `a + b*sqrt(r)` for `r >= 0`, decided exactly.
pub fn surd_sign(a: &BigRational, b: &BigRational, r: &BigInt) -> i32 {
    let sa = sign_of(a);
    let sb = if r.is_zero() { 0 } else { sign_of(b) };
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 r
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(r.clone());
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => 0,
    }
}

fn sign_of(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// A positive real algebraic number of degree at most two, `a + b*sqrt(r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveReal {
    a: BigRational,
    b: BigRational,
    r: BigInt,
}

impl PositiveReal {
    pub fn rational(x: BigRational) -> Result<Self> {
        PositiveReal::surd(x, BigRational::zero(), BigInt::zero())
    }

    pub fn int(n: impl Into<BigInt>) -> Result<Self> {
        PositiveReal::rational(BigRational::from_integer(n.into()))
    }

    /// `a + b*sqrt(r)`; fails unless the value is strictly positive.
    pub fn surd(a: BigRational, b: BigRational, r: BigInt) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidArgument("negative radicand in a real surd".into()));
        }
        if surd_sign(&a, &b, &r) <= 0 {
            return Err(Error::NonPositiveLog);
        }
        Ok(PositiveReal { a, b, r })
    }

    /// `|a + b*sqrt(r)|`; fails only on zero.
    pub fn abs_surd(a: BigRational, b: BigRational, r: BigInt) -> Result<Self> {
        match surd_sign(&a, &b, &r) {
            0 => Err(Error::NonPositiveLog),
            s if s < 0 => PositiveReal::surd(-a, -b, r),
            _ => PositiveReal::surd(a, b, r),
        }
    }

    pub fn parts(&self) -> (&BigRational, &BigRational, &BigInt) {
        (&self.a, &self.b, &self.r)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() || self.r.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.a.is_one()
    }

    pub fn eval(&self, bits: u32) -> RealInterval {
        let a = RealInterval::from_rational(&self.a, bits);
        if self.is_rational() {
            return a;
        }
        let root = RealInterval::from_int(self.r.clone(), bits)
            .sqrt()
            .expect("non-negative radicand");
        a.add(&RealInterval::from_rational(&self.b, bits).mul(&root))
    }
}

impl fmt::Display for PositiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.r)
        }
    }
}

/// Arithmetic expressions over logarithms of positive algebraic reals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LogExpr {
    Const(BigRational),
    Log(PositiveReal),
    Add(Box<LogExpr>, Box<LogExpr>),
    Sub(Box<LogExpr>, Box<LogExpr>),
    Mul(Box<LogExpr>, Box<LogExpr>),
    Div(Box<LogExpr>, Box<LogExpr>),
    Neg(Box<LogExpr>),
    /// Rational power; a non-integral exponent requires a non-negative base.
    Pow(Box<LogExpr>, BigRational),
    Max(Box<LogExpr>, Box<LogExpr>),
}

impl LogExpr {
    pub fn zero() -> Self {
        LogExpr::Const(BigRational::zero())
    }

    pub fn constant(x: BigRational) -> Self {
        LogExpr::Const(x)
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        LogExpr::Const(BigRational::from_integer(n.into()))
    }

    pub fn log(x: PositiveReal) -> Self {
        LogExpr::Log(x)
    }

    /// `log n` for a positive integer.
    pub fn log_int(n: impl Into<BigInt>) -> Result<Self> {
        Ok(LogExpr::Log(PositiveReal::int(n)?))
    }

    pub fn log_rational(x: BigRational) -> Result<Self> {
        Ok(LogExpr::Log(PositiveReal::rational(x)?))
    }

    pub fn scale(self, c: BigRational) -> Self {
        if c.is_one() {
            return self;
        }
        LogExpr::Mul(Box::new(LogExpr::Const(c)), Box::new(self))
    }

    pub fn pow(self, e: BigRational) -> Self {
        if e.is_one() {
            return self;
        }
        LogExpr::Pow(Box::new(self), e)
    }

    pub fn max(self, other: LogExpr) -> Self {
        LogExpr::Max(Box::new(self), Box::new(other))
    }

    pub fn sum<I: IntoIterator<Item = LogExpr>>(items: I) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => LogExpr::zero(),
            Some(first) => it.fold(first, |acc, x| acc + x),
        }
    }

    /// Evaluate at a fixed working precision without width control.
    pub fn eval_at(&self, bits: u32) -> Result<RealInterval> {
        Ok(match self {
            LogExpr::Const(c) => RealInterval::from_rational(c, bits),
            LogExpr::Log(x) => {
                if x.is_one() {
                    RealInterval::from_int(0, bits)
                } else {
                    x.eval(bits).ln()?
                }
            }
            LogExpr::Add(a, b) => a.eval_at(bits)?.add(&b.eval_at(bits)?),
            LogExpr::Sub(a, b) => a.eval_at(bits)?.sub(&b.eval_at(bits)?),
            LogExpr::Mul(a, b) => a.eval_at(bits)?.mul(&b.eval_at(bits)?),
            LogExpr::Div(a, b) => a.eval_at(bits)?.div(&b.eval_at(bits)?)?,
            LogExpr::Neg(a) => a.eval_at(bits)?.neg(),
            LogExpr::Pow(a, e) => {
                let base = a.eval_at(bits)?;
                if e.is_integer() {
                    base.pow_rational(e)?
                } else {
                    if base.is_negative() {
                        return Err(Error::NonPositiveLog);
                    }
                    if base.contains_zero() {
                        // x^e is increasing on [0, hi] for e > 0
                        if !e.is_positive() {
                            return Err(Error::DivisionByZero);
                        }
                        let hi = RealInterval::exact(base.hi().clone(), bits);
                        let top = if hi.hi().is_zero() {
                            RealInterval::from_int(0, bits)
                        } else {
                            hi.pow_rational(e)?
                        };
                        RealInterval::new(Dyadic::zero(), top.hi().clone(), bits)
                    } else {
                        base.pow_rational(e)?
                    }
                }
            }
            LogExpr::Max(a, b) => {
                let (x, y) = (a.eval_at(bits)?, b.eval_at(bits)?);
                RealInterval::new(
                    Dyadic::max(x.lo(), y.lo()),
                    Dyadic::max(x.hi(), y.hi()),
                    bits,
                )
            }
        })
    }
}

impl ops::Add for LogExpr {
    type Output = LogExpr;
    fn add(self, rhs: LogExpr) -> LogExpr {
        LogExpr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for LogExpr {
    type Output = LogExpr;
    fn sub(self, rhs: LogExpr) -> LogExpr {
        LogExpr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for LogExpr {
    type Output = LogExpr;
    fn mul(self, rhs: LogExpr) -> LogExpr {
        LogExpr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for LogExpr {
    type Output = LogExpr;
    fn div(self, rhs: LogExpr) -> LogExpr {
        LogExpr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for LogExpr {
    type Output = LogExpr;
    fn neg(self) -> LogExpr {
        LogExpr::Neg(Box::new(self))
    }
}

impl fmt::Display for LogExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogExpr::Const(c) => write!(f, "{c}"),
            LogExpr::Log(x) => write!(f, "log({x})"),
            LogExpr::Add(a, b) => write!(f, "({a} + {b})"),
            LogExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            LogExpr::Mul(a, b) => write!(f, "{a}*{b}"),
            LogExpr::Div(a, b) => write!(f, "{a}/({b})"),
            LogExpr::Neg(a) => write!(f, "-{a}"),
            LogExpr::Pow(a, e) => write!(f, "({a})^({e})"),
            LogExpr::Max(a, b) => write!(f, "max({a}, {b})"),
        }
    }
}

/// Smallest absolute value in the interval.
fn mig(x: &RealInterval) -> Dyadic {
    if x.contains_zero() {
        Dyadic::zero()
    } else {
        Dyadic::min(&x.lo().abs(), &x.hi().abs())
    }
}

/// Enclose `expr` with width at most `2^(2-bits) * max(1, |value|)`.
pub fn eval_log_expr(expr: &LogExpr, precision_bits: u32) -> Result<RealInterval> {
    let bound_exp = 2 - precision_bits as i64;
    let mut guard = 32u32;
    loop {
        let iv = expr.eval_at(precision_bits + guard)?;
        let scale = Dyadic::max(&Dyadic::one(), &mig(&iv));
        let allowed = &Dyadic::pow2(bound_exp) * &scale;
        if iv.width() <= allowed {
            return Ok(iv.with_precision(precision_bits + 8));
        }
        if guard > 16 * precision_bits.max(256) {
            return Err(Error::Indeterminate {
                precision_bits: precision_bits + guard,
                detail: format!("cannot narrow {expr} to the requested width"),
            });
        }
        guard *= 2;
    }
}

/// Outcome of an adaptive comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Greater,
    Tie,
}

impl Comparison {
    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            Comparison::Tie => Comparison::Tie,
        }
    }

    /// `true` for Less and Tie.
    pub fn is_le(self) -> bool {
        self != Comparison::Greater
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Less => "less",
            Comparison::Greater => "greater",
            Comparison::Tie => "tie",
        })
    }
}

pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;
pub const START_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 4096;

/// Precision schedule and tie tolerance for [`compare_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareConfig {
    pub start_bits: u32,
    pub max_bits: u32,
    pub tie_tolerance: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            start_bits: START_PRECISION,
            max_bits: MAX_PRECISION,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

impl CompareConfig {
    pub fn with_tolerance(tie_tolerance: f64) -> Self {
        CompareConfig {
            tie_tolerance,
            ..CompareConfig::default()
        }
    }
}

pub fn compare_adaptive(a: &LogExpr, b: &LogExpr, tie_tolerance: f64) -> Result<Comparison> {
    compare_with(a, b, &CompareConfig::with_tolerance(tie_tolerance))
}

/// Compare by doubling precision from `start_bits` up to `max_bits`.
pub fn compare_with(a: &LogExpr, b: &LogExpr, cfg: &CompareConfig) -> Result<Comparison> {
    if !(cfg.tie_tolerance > 0.0) {
        return Err(Error::InvalidArgument("tie tolerance must be positive".into()));
    }
    if a == b {
        a.eval_at(64)?;
        return Ok(Comparison::Tie);
    }
    let tol = Dyadic::from_f64(cfg.tie_tolerance);
    let mut bits = cfg.start_bits.max(16);
    loop {
        let x = eval_log_expr(a, bits)?;
        let y = eval_log_expr(b, bits)?;
        let diff = x.sub(&y);
        if diff.mag() < tol {
            return Ok(Comparison::Tie);
        }
        if diff.hi().signum() < 0 {
            return Ok(Comparison::Less);
        }
        if diff.lo().signum() > 0 {
            return Ok(Comparison::Greater);
        }
        if bits >= cfg.max_bits {
            return Err(Error::Indeterminate {
                precision_bits: bits,
                detail: format!("{a} vs {b}"),
            });
        }
        bits = (bits * 2).min(cfg.max_bits);
    }
}
