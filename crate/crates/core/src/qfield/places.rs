use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::FieldElement;
use crate::error::{Error, Result};
use crate::ideals::PrimeIdeal;
use crate::realnum::{RealInterval, START_PRECISION};

/// A place of the field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    /// The real place of `Q`.
    Infinite,
    /// Real embedding 1 (`sqrt(d) > 0`) or 2.
    Real(u8),
    Complex,
    Finite(PrimeIdeal),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Real(i) => write!(f, "real{i}"),
            Place::Complex => f.write_str("complex"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

pub fn abs_values(x: &FieldElement) -> Result<Vec<(Place, RealInterval)>> {
    abs_values_at(x, START_PRECISION)
}

/// Normalized absolute values `|x|_v`: every archimedean place, and each finite
/// place where `|x|_v != 1`. Their product is 1.
pub fn abs_values_at(x: &FieldElement, bits: u32) -> Result<Vec<(Place, RealInterval)>> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let field = x.field();
    let degree = field.degree();
    let mut out = Vec::new();
    match field.d() {
        None => {
            let r = x.as_rational().expect("rational field");
            out.push((Place::Infinite, RealInterval::from_rational(&r.abs(), bits)));
        }
        Some(d) if d > 0 => {
            let [s1, s2] = x.embeddings(bits).expect("real field");
            for (i, s) in [(1u8, s1), (2u8, s2)] {
                out.push((Place::Real(i), s.abs().sqrt()?));
            }
        }
        Some(_) => {
            let n = x.norm();
            out.push((Place::Complex, RealInterval::from_rational(&n, bits).sqrt()?));
        }
    }
    for (p, e) in x.valuations()?.iter() {
        // N(P)^(-e/[K:Q])
        let np = p.norm();
        let base = if e > 0 {
            BigRational::new(BigInt::one(), np.pow(e as u32))
        } else {
            BigRational::from_integer(np.pow((-e) as u32))
        };
        let mut v = RealInterval::from_rational(&base, bits);
        if degree == 2 {
            v = v.sqrt()?;
        }
        out.push((Place::Finite(p.clone()), v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::{parse_element, Field};
    use crate::realnum::Dyadic;

    fn product(vals: &[(Place, RealInterval)]) -> RealInterval {
        vals.iter()
            .fold(RealInterval::from_int(1, 128), |acc, (_, v)| acc.mul(v))
    }

    #[test]
    fn known_abs_values() {
        let f = Field::quadratic(3).unwrap();
        let vals = abs_values(&parse_element(f, "1+sqrt(3)").unwrap()).unwrap();
        assert!((vals[0].1.to_f64() - 1.6529).abs() < 1e-4);
        assert!((vals[1].1.to_f64() - 0.8556).abs() < 1e-4);
        assert!(product(&vals).contains(&Dyadic::one()));

        let g = Field::quadratic(-1).unwrap();
        let vals = abs_values(&parse_element(g, "1+i").unwrap()).unwrap();
        assert_eq!(vals[0].0, Place::Complex);
        assert!((vals[0].1.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(product(&vals).contains(&Dyadic::one()));

        let vals = abs_values(&FieldElement::one(f)).unwrap();
        assert_eq!(vals.len(), 2);
        assert!(vals.iter().all(|(_, v)| v.contains(&Dyadic::one())));
        assert_eq!(abs_values(&FieldElement::zero(f)), Err(Error::ZeroInput));
    }
}
