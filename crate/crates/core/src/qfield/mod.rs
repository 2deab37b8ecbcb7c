//! The rational field and quadratic fields `Q(sqrt(d))`, their elements and heights.

mod element;
mod height;
mod parse;
mod places;

use std::fmt;
use std::str::FromStr;

use crate::arith::is_squarefree;
use crate::error::{Error, Result};

pub use element::{element_arith, ArithOp, FieldElement};
pub use height::{
    compare_heights, mahler_measure_over, minimal_polynomial, weil_height, weil_height_at,
    ExactLog, HeightValue,
};
pub use parse::parse_element;
pub use places::{abs_values, abs_values_at, Place};

/// A quadratic field `Q(sqrt(d))` with `d` squarefree, `d != 0, 1`.
///
/// Elements are written over the basis `(1, w)` where `w = (1+sqrt(d))/2`
/// when `d = 1 mod 4` and `w = sqrt(d)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::BadRadicand(d));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// True when `w = (1+sqrt(d))/2`.
    pub fn omega_is_half(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    pub fn discriminant(&self) -> i64 {
        if self.omega_is_half() {
            self.d
        } else {
            4 * self.d
        }
    }

    /// `(real places, complex places)`.
    pub fn signature(&self) -> (u32, u32) {
        if self.d > 0 {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    /// Trace of `w`.
    pub fn omega_trace(&self) -> i64 {
        i64::from(self.omega_is_half())
    }

    /// Norm of `w`, so that `w^2 = trace*w - norm`.
    pub fn omega_norm(&self) -> i64 {
        if self.omega_is_half() {
            (1 - self.d) / 4
        } else {
            -self.d
        }
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// Either `Q` itself or a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Quadratic(QuadField),
}

impl Field {
    pub fn quadratic(d: i64) -> Result<Field> {
        Ok(Field::Quadratic(QuadField::new(d)?))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Field::Rational => 1,
            Field::Quadratic(_) => 2,
        }
    }

    pub fn quad(&self) -> Option<&QuadField> {
        match self {
            Field::Rational => None,
            Field::Quadratic(k) => Some(k),
        }
    }

    pub fn d(&self) -> Option<i64> {
        self.quad().map(QuadField::d)
    }

    pub fn discriminant(&self) -> i64 {
        self.quad().map_or(1, QuadField::discriminant)
    }

    pub fn omega_trace(&self) -> i64 {
        self.quad().map_or(0, QuadField::omega_trace)
    }

    pub fn omega_norm(&self) -> i64 {
        self.quad().map_or(0, QuadField::omega_norm)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Field::Rational)
    }

    pub fn is_real_quadratic(&self) -> bool {
        matches!(self, Field::Quadratic(k) if k.is_real())
    }

    pub fn is_imaginary_quadratic(&self) -> bool {
        matches!(self, Field::Quadratic(k) if !k.is_real())
    }

    /// Number of archimedean places.
    pub fn archimedean_places(&self) -> u32 {
        match self {
            Field::Rational => 1,
            Field::Quadratic(k) => {
                let (r, c) = k.signature();
                r + c
            }
        }
    }

    /// The common field of two operands; `Q` embeds into every quadratic field.
    pub fn join(&self, other: &Field) -> Result<Field> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(*f),
            (a, b) if a == b => Ok(*a),
            (a, b) => Err(Error::FieldMismatch(a.to_string(), b.to_string())),
        }
    }
}

impl From<QuadField> for Field {
    fn from(k: QuadField) -> Self {
        Field::Quadratic(k)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Quadratic(k) => k.fmt(f),
        }
    }
}

/// Accepts `Q` (or `1`) for the rationals and a signed squarefree integer otherwise.
impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") || s == "1" {
            return Ok(Field::Rational);
        }
        let d: i64 = s.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("expected Q or an integer, found {s:?}"),
        })?;
        Field::quadratic(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_constants() {
        let k = QuadField::new(-5).unwrap();
        assert_eq!(k.discriminant(), -20);
        assert_eq!(k.signature(), (0, 1));
        let k = QuadField::new(5).unwrap();
        assert_eq!(k.discriminant(), 5);
        assert_eq!((k.omega_trace(), k.omega_norm()), (1, -1));
        let k = QuadField::new(-3).unwrap();
        assert_eq!((k.omega_trace(), k.omega_norm()), (1, 1));
        assert_eq!(QuadField::new(12), Err(Error::BadRadicand(12)));
        assert_eq!(QuadField::new(1), Err(Error::BadRadicand(1)));
    }

    #[test]
    fn parse_field_names() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("-163".parse::<Field>().unwrap(), Field::quadratic(-163).unwrap());
        assert!("-4".parse::<Field>().is_err());
    }
}
