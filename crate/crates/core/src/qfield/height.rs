use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Field, FieldElement};
use crate::error::{Error, Result};
use crate::realnum::{
    compare_with, eval_log_expr, surd_sign, CompareConfig, Comparison, Dyadic, LogExpr,
    PositiveReal, RealInterval, START_PRECISION,
};

/// `(1/n) * log(m)` with `m >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactLog {
    n: u32,
    m: BigInt,
}

impl ExactLog {
    pub fn new(n: u32, m: BigInt) -> Self {
        assert!(n >= 1 && m >= BigInt::one(), "exact log needs n >= 1 and m >= 1");
        let mut e = ExactLog { n, m };
        e.reduce();
        e
    }

    pub fn zero() -> Self {
        ExactLog::new(1, BigInt::one())
    }

    // (1/4) log 9 -> (1/2) log 3 when m is a perfect power
    fn reduce(&mut self) {
        if self.m.is_one() {
            self.n = 1;
            return;
        }
        while self.n % 2 == 0 {
            match crate::arith::exact_sqrt(&self.m) {
                Some(r) => {
                    self.m = r;
                    self.n /= 2;
                }
                None => break,
            }
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_one()
    }

    /// `k * self`.
    pub fn scale(&self, k: u32) -> ExactLog {
        if k == 0 {
            return ExactLog::zero();
        }
        let g = k.gcd(&self.n);
        ExactLog::new(self.n / g, self.m.pow(k / g))
    }

    pub fn to_expr(&self) -> LogExpr {
        if self.is_zero() {
            return LogExpr::zero();
        }
        let l = LogExpr::log_int(self.m.clone()).expect("m >= 1");
        l.scale(BigRational::new(1.into(), self.n.into()))
    }

    /// Exact comparison `self` vs `other`: `m1^n2` vs `m2^n1`.
    pub fn cmp_exact(&self, other: &ExactLog) -> std::cmp::Ordering {
        self.m.pow(other.n).cmp(&other.m.pow(self.n))
    }
}

impl fmt::Display for ExactLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else if self.n == 1 {
            write!(f, "log({})", self.m)
        } else {
            write!(f, "(1/{})*log({})", self.n, self.m)
        }
    }
}

/// A logarithmic height: an expression, its enclosure, and an exact form when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightValue {
    exact: Option<ExactLog>,
    expr: LogExpr,
    numeric: RealInterval,
}

impl HeightValue {
    pub fn from_exact(e: ExactLog, bits: u32) -> Self {
        let expr = e.to_expr();
        let numeric = eval_log_expr(&expr, bits).expect("log of a positive integer");
        HeightValue {
            exact: Some(e),
            expr,
            numeric: clamp_nonneg(numeric),
        }
    }

    /// A height known only as an expression; the caller guarantees it is non-negative.
    pub fn from_expr(expr: LogExpr, bits: u32) -> Result<Self> {
        let numeric = clamp_nonneg(eval_log_expr(&expr, bits)?);
        Ok(HeightValue {
            exact: None,
            expr,
            numeric,
        })
    }

    pub fn zero() -> Self {
        HeightValue::from_exact(ExactLog::zero(), START_PRECISION)
    }

    pub fn exact_form(&self) -> Option<&ExactLog> {
        self.exact.as_ref()
    }

    pub fn expr(&self) -> &LogExpr {
        &self.expr
    }

    pub fn numeric(&self) -> &RealInterval {
        &self.numeric
    }

    pub fn to_f64(&self) -> f64 {
        self.numeric.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(ExactLog::is_zero)
    }

    /// `k * self` for a positive integer degree factor.
    pub fn scale(&self, k: u32) -> HeightValue {
        let bits = self.numeric.precision_bits().saturating_sub(8).max(64);
        match &self.exact {
            Some(e) => HeightValue::from_exact(e.scale(k), bits),
            None => HeightValue::from_expr(
                self.expr.clone().scale(BigRational::from_integer(k.into())),
                bits,
            )
            .expect("scaling an evaluable expression"),
        }
    }

    /// Decimal text with 15 digits after the point.
    pub fn decimal(&self) -> String {
        format!("{:.15}", self.to_f64())
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{e} = {}", self.decimal()),
            None => f.write_str(&self.decimal()),
        }
    }
}

fn clamp_nonneg(x: RealInterval) -> RealInterval {
    if x.lo().signum() >= 0 {
        return x;
    }
    let hi = Dyadic::max(&Dyadic::zero(), x.hi());
    RealInterval::new(Dyadic::zero(), hi, x.precision_bits())
}

/// Compare two heights, exactly when both have exact forms.
pub fn compare_heights(a: &HeightValue, b: &HeightValue, cfg: &CompareConfig) -> Result<Comparison> {
    if let (Some(x), Some(y)) = (&a.exact, &b.exact) {
        return Ok(match x.cmp_exact(y) {
            std::cmp::Ordering::Less => Comparison::Less,
            std::cmp::Ordering::Equal => Comparison::Tie,
            std::cmp::Ordering::Greater => Comparison::Greater,
        });
    }
    compare_with(&a.expr, &b.expr, cfg)
}

/// Primitive integer minimal polynomial over `Q`, constant term first, leading coefficient positive.
pub fn minimal_polynomial(x: &FieldElement) -> Vec<BigInt> {
    let coeffs: Vec<BigRational> = if x.is_rational() {
        vec![-x.as_rational().expect("rational"), BigRational::one()]
    } else {
        vec![x.norm(), -x.trace(), BigRational::one()]
    };
    let l = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

pub fn weil_height(x: &FieldElement) -> Result<HeightValue> {
    weil_height_at(x, START_PRECISION)
}

/// Weil height from the Mahler measure of the minimal polynomial.
pub fn weil_height_at(x: &FieldElement, bits: u32) -> Result<HeightValue> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let poly = minimal_polynomial(x);
    if poly.len() == 2 {
        // a1 X + a0: h = log max(|a0|, |a1|)
        let m = poly[0].abs().max(poly[1].abs());
        return Ok(HeightValue::from_exact(ExactLog::new(1, m), bits));
    }
    let (a0, a2) = (&poly[0], &poly[2]);
    let d = x.field().d().expect("irrational element");
    if d < 0 {
        // complex conjugate roots with |root|^2 = a0/a2
        let m = a0.abs().max(a2.clone());
        return Ok(HeightValue::from_exact(ExactLog::new(2, m), bits));
    }
    let (a, b) = x.sqrt_coords();
    let r = BigInt::from(d);
    let big = |bb: &BigRational| -> bool {
        surd_sign(&(&a - BigRational::one()), bb, &r) >= 0
            || surd_sign(&(&a + BigRational::one()), bb, &r) <= 0
    };
    let nb = -&b;
    match (big(&b), big(&nb)) {
        (true, true) => Ok(HeightValue::from_exact(ExactLog::new(2, a0.abs()), bits)),
        (false, false) => Ok(HeightValue::from_exact(ExactLog::new(2, a2.clone()), bits)),
        (s1, _) => {
            // M = a2 * |root outside the unit disc|
            let coeff = BigRational::from_integer(a2.clone());
            let root_b = if s1 { b.clone() } else { nb };
            let m = PositiveReal::abs_surd(&a * &coeff, &root_b * &coeff, r)?;
            let expr = LogExpr::log(m).scale(BigRational::new(1.into(), 2.into()));
            HeightValue::from_expr(expr, bits)
        }
    }
}

/// `[K(x):K] * h(x)`.
pub fn mahler_measure_over(base: Field, x: &FieldElement) -> Result<HeightValue> {
    let h = weil_height(x)?;
    let degree = match base {
        Field::Rational => {
            if x.is_rational() {
                1
            } else {
                2
            }
        }
        Field::Quadratic(_) => {
            if x.is_rational() || x.field() == base {
                1
            } else {
                return Err(Error::UnsupportedTower(format!(
                    "{x} generates a quadratic extension of {base}"
                )));
            }
        }
    };
    Ok(if degree == 1 { h } else { h.scale(degree) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::parse_element;

    fn el(d: i64, s: &str) -> FieldElement {
        let f = if d == 1 { Field::Rational } else { Field::quadratic(d).unwrap() };
        parse_element(f, s).unwrap()
    }

    #[test]
    fn known_heights() {
        assert!(weil_height(&el(3, "1")).unwrap().is_zero());
        assert!(weil_height(&el(-1, "i")).unwrap().is_zero());
        assert!(weil_height(&el(-3, "w")).unwrap().is_zero());
        let h = weil_height(&el(2, "1+sqrt(2)")).unwrap();
        assert!(h.exact_form().is_none());
        let want = 0.5 * (1.0 + 2f64.sqrt()).ln();
        assert!((h.to_f64() - want).abs() < 1e-15);
        let h = weil_height(&el(1, "2/3")).unwrap();
        assert_eq!(h.exact_form(), Some(&ExactLog::new(1, 3.into())));
        assert_eq!(weil_height(&el(1, "0")), Err(Error::ZeroInput));
    }

    #[test]
    fn known_measures() {
        let m = mahler_measure_over(Field::Rational, &el(1, "2")).unwrap();
        assert_eq!(m.exact_form(), Some(&ExactLog::new(1, 2.into())));
        let m = mahler_measure_over(Field::Rational, &el(2, "sqrt(2)")).unwrap();
        assert_eq!(m.exact_form(), Some(&ExactLog::new(1, 2.into())));
        let k = Field::quadratic(-1).unwrap();
        let m = mahler_measure_over(k, &el(-1, "1+i")).unwrap();
        assert_eq!(m.exact_form(), Some(&ExactLog::new(2, 2.into())));
        assert!(matches!(
            mahler_measure_over(k, &el(2, "sqrt(2)")),
            Err(Error::UnsupportedTower(_))
        ));
    }

    #[test]
    fn exact_log_arithmetic() {
        assert_eq!(ExactLog::new(2, 9.into()), ExactLog::new(1, 3.into()));
        assert_eq!(ExactLog::new(2, 5.into()).scale(2), ExactLog::new(1, 5.into()));
        assert_eq!(ExactLog::new(1, 5.into()).scale(3), ExactLog::new(1, 125.into()));
        assert_eq!(ExactLog::new(2, 5.into()).to_string(), "(1/2)*log(5)");
        assert_eq!(
            ExactLog::new(2, 8.into()).cmp_exact(&ExactLog::new(1, 3.into())),
            std::cmp::Ordering::Less
        );
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(minimal_polynomial(&el(5, "w")), vec![(-1).into(), (-1).into(), BigInt::one()]);
        assert_eq!(minimal_polynomial(&el(-1, "(1+i)/2")), vec![1.into(), (-2).into(), 2.into()]);
        assert_eq!(minimal_polynomial(&el(1, "-2/3")), vec![2.into(), 3.into()]);
    }
}
