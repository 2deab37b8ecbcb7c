use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Field, FieldElement};
use crate::arith::factor;
use crate::error::{Error, Result};

/// Parse an element of `field`.
///
/// Accepts integers, `sqrt(n)`, `w`, `i`, `+ - * / ^` and parentheses, so the
/// canonical printed forms (`a/b`, `(A+B*sqrt(d))/M`, `(p+q*w)/m`) all round-trip.
pub fn parse_element(field: Field, text: &str) -> Result<FieldElement> {
    let mut p = Parser {
        field,
        src: text.as_bytes(),
        pos: 0,
    };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(x)
}

struct Parser<'a> {
    field: Field,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc.try_mul(&self.unary()?)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return Err(Error::Parse {
                        pos: at,
                        msg: "division by zero".into(),
                    });
                }
                acc = acc.try_div(&rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        let at = self.pos;
        let e = self
            .integer()?
            .to_i64()
            .filter(|e| e.abs() <= 4096)
            .ok_or(Error::Parse {
                pos: at,
                msg: "exponent out of range".into(),
            })?;
        base.pow(if neg { -e } else { e })
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<FieldElement> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(FieldElement::from_int(self.field, self.integer()?)),
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(b')')?;
                Ok(x)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let w = self.word();
                match w.as_str() {
                    "sqrt" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        let r = arg.as_rational().ok_or(Error::Parse {
                            pos: start,
                            msg: "sqrt of an irrational argument".into(),
                        })?;
                        sqrt_in_field(self.field, &r).map_err(|msg| Error::Parse { pos: start, msg })
                    }
                    "w" => FieldElement::omega(self.field).map_err(|_| Error::Parse {
                        pos: start,
                        msg: "w is undefined over Q".into(),
                    }),
                    "i" => sqrt_in_field(self.field, &BigRational::from_integer((-1).into()))
                        .map_err(|msg| Error::Parse { pos: start, msg }),
                    _ => Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown name {w:?}"),
                    }),
                }
            }
            _ => Err(self.err("expected a number, sqrt(...), w, i or '('")),
        }
    }
}

/// `sqrt(r)` as an element of `field`, if it lies there.
fn sqrt_in_field(field: Field, r: &BigRational) -> std::result::Result<FieldElement, String> {
    if r.is_zero() {
        return Ok(FieldElement::zero(field));
    }
    // sqrt(u/v) = sqrt(u*v)/v, and u*v = sign * k^2 * m with m squarefree
    let n = r.numer() * r.denom();
    let mut k = BigInt::one();
    let mut m = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let fac = factor(&n.abs()).map_err(|e| e.to_string())?;
    for (p, e) in fac {
        k *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= p;
        }
    }
    let coeff = BigRational::new(k, r.denom().clone());
    if m.is_one() {
        return Ok(FieldElement::from_rational(field, &coeff));
    }
    match field.d() {
        Some(d) if m == BigInt::from(d) => {
            FieldElement::from_sqrt_coords(field, &BigRational::zero(), &coeff).map_err(|e| e.to_string())
        }
        _ => Err(format!("sqrt({r}) does not lie in {field}")),
    }
}
