use std::fmt;

use super::{factor_ideal, IntegralIdeal, ValuationVector};
use crate::error::{Error, Result};
use crate::qfield::{Field, FieldElement};

/// A fractional ideal `J / J'` with `J + J' = O_K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FractionalIdealRatio {
    numerator: IntegralIdeal,
    denominator: IntegralIdeal,
}

impl FractionalIdealRatio {
    /// `num / den`, reduced to coprime form by cancelling `num + den`.
    pub fn new(num: &IntegralIdeal, den: &IntegralIdeal) -> Result<Self> {
        let g = num.add(den)?;
        Ok(FractionalIdealRatio {
            numerator: num.quotient(&g)?,
            denominator: den.quotient(&g)?,
        })
    }

    pub fn integral(i: &IntegralIdeal) -> Self {
        FractionalIdealRatio {
            numerator: i.clone(),
            denominator: IntegralIdeal::unit(i.field()),
        }
    }

    pub fn unit(field: Field) -> Self {
        FractionalIdealRatio::integral(&IntegralIdeal::unit(field))
    }

    pub fn numerator(&self) -> &IntegralIdeal {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntegralIdeal {
        &self.denominator
    }

    pub fn field(&self) -> Field {
        self.numerator.field()
    }

    pub fn is_integral(&self) -> bool {
        self.denominator.is_unit()
    }

    pub fn is_unit(&self) -> bool {
        self.numerator.is_unit() && self.denominator.is_unit()
    }

    pub fn inverse(&self) -> Self {
        FractionalIdealRatio {
            numerator: self.denominator.clone(),
            denominator: self.numerator.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        FractionalIdealRatio::new(
            &self.numerator.mul(&other.numerator)?,
            &self.denominator.mul(&other.denominator)?,
        )
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse())
    }

    pub fn valuations(&self) -> Result<ValuationVector> {
        Ok(factor_ideal(&self.numerator)?.minus(&factor_ideal(&self.denominator)?))
    }
}

impl fmt::Display for FractionalIdealRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.numerator, self.denominator)
    }
}

/// `x*O_K` as a coprime ratio of integral ideals.
pub fn coprime_split(x: &FieldElement) -> Result<FractionalIdealRatio> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let field = x.field();
    let den = FieldElement::from_int(field, x.den().clone());
    let num = x * &den;
    FractionalIdealRatio::new(&IntegralIdeal::principal(&num)?, &IntegralIdeal::principal(&den)?)
}

/// `O_K / x`.
pub fn ideal_inverse(x: &IntegralIdeal) -> FractionalIdealRatio {
    FractionalIdealRatio {
        numerator: IntegralIdeal::unit(x.field()),
        denominator: x.clone(),
    }
}

/// `x + y = O_K`.
pub fn is_coprime(x: &IntegralIdeal, y: &IntegralIdeal) -> Result<bool> {
    Ok(x.add(y)?.is_unit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::parse_ideal;
    use crate::qfield::parse_element;

    fn k(d: i64) -> Field {
        Field::quadratic(d).unwrap()
    }

    #[test]
    fn known_coprime_splits() {
        let z = Field::Rational;
        let r = coprime_split(&parse_element(z, "6").unwrap()).unwrap();
        assert_eq!(r.numerator(), &parse_ideal(z, "(6)").unwrap());
        assert!(r.denominator().is_unit());
        let r = coprime_split(&parse_element(z, "2/3").unwrap()).unwrap();
        assert_eq!(r.numerator(), &parse_ideal(z, "(2)").unwrap());
        assert_eq!(r.denominator(), &parse_ideal(z, "(3)").unwrap());

        let f = k(-5);
        let r = coprime_split(&parse_element(f, "(1+sqrt(-5))/2").unwrap()).unwrap();
        assert_eq!(r.numerator().norm(), 3.into());
        assert_eq!(r.denominator(), &parse_ideal(f, "(2, 1+sqrt(-5))").unwrap());
        assert!(is_coprime(r.numerator(), r.denominator()).unwrap());
    }

    #[test]
    fn known_inverses() {
        let f = k(-5);
        let o = IntegralIdeal::unit(f);
        assert!(ideal_inverse(&o).is_unit());
        let two = parse_ideal(f, "(2)").unwrap();
        assert_eq!(ideal_inverse(&two).denominator(), &two);
        // inverse(P) equals P/(2): cross-multiply O_K * (2) = P * P
        let p = parse_ideal(f, "(2, 1+sqrt(-5))").unwrap();
        let inv = ideal_inverse(&p);
        assert_eq!(inv.numerator().mul(&two).unwrap(), p.mul(inv.denominator()).unwrap());
        assert_eq!(FractionalIdealRatio::new(&p, &two).unwrap(), inv);
        assert!(FractionalIdealRatio::integral(&p).mul(&inv).unwrap().is_unit());
    }

    #[test]
    fn known_coprimality() {
        let f = k(-5);
        let two = parse_ideal(f, "(2)").unwrap();
        let three = parse_ideal(f, "(3)").unwrap();
        let q = parse_ideal(f, "(1+sqrt(-5))").unwrap();
        assert!(is_coprime(&two, &three).unwrap());
        assert!(!is_coprime(&two, &q).unwrap());
        assert!(is_coprime(&IntegralIdeal::unit(f), &q).unwrap());
    }
}
