//! Integral ideals of `O_K` in Hermite normal form, prime splitting and factorization.

mod prime;
mod ratio;
mod refine;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qfield::{parse_element, Field, FieldElement};

pub use prime::{factor_ideal, prime_split, PrimeIdeal, SplitType, ValuationVector};
pub use ratio::{coprime_split, ideal_inverse, is_coprime, FractionalIdealRatio};
pub use refine::refine_factorization;

/// The ideal `a*Z + (b + c*w)*Z` with `c | a`, `c | b`, `0 <= b < a`.
///
/// Over `Q` the ideal is `a*Z` and `b = 0`, `c = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralIdeal {
    field: Field,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

fn gcd(x: &BigInt, y: &BigInt) -> BigInt {
    x.gcd(y)
}

impl IntegralIdeal {
    /// Validate and wrap an HNF triple.
    pub fn from_hnf(field: Field, a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        let bad = |why| Error::BadHnf {
            a: a.clone(),
            b: b.clone(),
            c: c.clone(),
            why,
        };
        if !a.is_positive() || !c.is_positive() {
            return Err(bad("a and c must be positive"));
        }
        if b.is_negative() || b >= a {
            return Err(bad("need 0 <= b < a"));
        }
        if field.is_rational() {
            if !b.is_zero() || !c.is_one() {
                return Err(bad("ideals of Z have b = 0, c = 1"));
            }
            return Ok(IntegralIdeal { field, a, b, c });
        }
        if !(&a % &c).is_zero() || !(&b % &c).is_zero() {
            return Err(bad("c must divide a and b"));
        }
        // w*(b + c*w) = -c*n + (b + c*t)*w must lie in the module
        let t = field.omega_trace();
        let n = field.omega_norm();
        let y = &b + &c * t;
        let x = -(&c * n) - (&y / &c) * &b;
        if !(x % &a).is_zero() {
            return Err(bad("module is not closed under multiplication by w"));
        }
        Ok(IntegralIdeal { field, a, b, c })
    }

    /// HNF of the Z-module spanned by integer coordinate vectors `(x, y)` over `(1, w)`.
    fn from_module(field: Field, vecs: impl IntoIterator<Item = (BigInt, BigInt)>) -> Result<Self> {
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        let mut c = BigInt::zero();
        for (x, y) in vecs {
            if y.is_zero() {
                a = gcd(&a, &x);
                continue;
            }
            if c.is_zero() {
                b = x;
                c = y;
                continue;
            }
            let eg = c.extended_gcd(&y);
            let g = eg.gcd;
            let nb = &eg.x * &b + &eg.y * &x;
            let x0 = (&y / &g) * &b - (&c / &g) * &x;
            a = gcd(&a, &x0);
            b = nb;
            c = g;
        }
        if c.is_negative() {
            b = -b;
            c = -c;
        }
        if field.is_rational() {
            if !c.is_zero() {
                return Err(Error::InvalidArgument("w-part in an ideal of Z".into()));
            }
            if a.is_zero() {
                return Err(Error::ZeroInput);
            }
            return Ok(IntegralIdeal {
                field,
                a,
                b: BigInt::zero(),
                c: BigInt::one(),
            });
        }
        if a.is_zero() || c.is_zero() {
            return Err(Error::ZeroInput);
        }
        b = b.mod_floor(&a);
        Ok(IntegralIdeal { field, a, b, c })
    }

    /// The ideal generated by integral elements.
    pub fn from_generators(field: Field, gens: &[FieldElement]) -> Result<Self> {
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for g in gens {
            let g = g.coerce(field)?;
            if !g.is_integral() {
                return Err(Error::NotIntegral);
            }
            vecs.push((g.p().clone(), g.q().clone()));
            if !field.is_rational() {
                let gw = &g * &FieldElement::omega(field)?;
                vecs.push((gw.p().clone(), gw.q().clone()));
            }
        }
        IntegralIdeal::from_module(field, vecs)
    }

    pub fn principal(x: &FieldElement) -> Result<Self> {
        IntegralIdeal::from_generators(x.field(), std::slice::from_ref(x))
    }

    pub fn from_int(field: Field, n: impl Into<BigInt>) -> Result<Self> {
        IntegralIdeal::principal(&FieldElement::from_int(field, n))
    }

    /// The whole ring `O_K`.
    pub fn unit(field: Field) -> Self {
        IntegralIdeal {
            field,
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_one()
    }

    /// Z-basis `a`, `b + c*w`.
    pub fn basis(&self) -> [FieldElement; 2] {
        let second = if self.field.is_rational() {
            FieldElement::from_int(self.field, self.a.clone())
        } else {
            FieldElement::new(self.field, self.b.clone(), self.c.clone(), BigInt::one())
                .expect("den = 1")
        };
        [FieldElement::from_int(self.field, self.a.clone()), second]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    fn contains_coords(&self, x: &BigInt, y: &BigInt) -> bool {
        if !(y % &self.c).is_zero() {
            return false;
        }
        let k = y / &self.c;
        ((x - k * &self.b) % &self.a).is_zero()
    }

    pub fn contains_element(&self, x: &FieldElement) -> bool {
        match x.coerce(self.field) {
            Ok(x) if x.is_integral() => self.contains_coords(x.p(), x.q()),
            _ => false,
        }
    }

    /// `other ⊆ self`, by membership of both generators.
    pub fn contains(&self, other: &Self) -> bool {
        if self.field != other.field {
            return false;
        }
        if self.field.is_rational() {
            return (&other.a % &self.a).is_zero();
        }
        self.contains_coords(&other.a, &BigInt::zero())
            && self.contains_coords(&other.b, &other.c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.field.is_rational() {
            return Ok(IntegralIdeal::unit(self.field).with_a(&self.a * &other.a));
        }
        if self.is_unit() {
            return Ok(other.clone());
        }
        if other.is_unit() {
            return Ok(self.clone());
        }
        let [x1, y1] = self.basis();
        let [x2, y2] = other.basis();
        let prods = [&x1 * &x2, &x1 * &y2, &y1 * &x2, &y1 * &y2];
        IntegralIdeal::from_module(
            self.field,
            prods.iter().map(|e| (e.p().clone(), e.q().clone())),
        )
    }

    fn with_a(mut self, a: BigInt) -> Self {
        self.a = a;
        self
    }

    /// The sum `I + J`, i.e. the ideal gcd.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.field.is_rational() {
            return Ok(IntegralIdeal::unit(self.field).with_a(gcd(&self.a, &other.a)));
        }
        IntegralIdeal::from_module(
            self.field,
            [
                (self.a.clone(), BigInt::zero()),
                (self.b.clone(), self.c.clone()),
                (other.a.clone(), BigInt::zero()),
                (other.b.clone(), other.c.clone()),
            ],
        )
    }

    /// `I ∩ J = IJ / (I + J)`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.quotient(&self.add(other)?)
    }

    pub fn conjugate(&self) -> Self {
        if self.field.is_rational() {
            return self.clone();
        }
        let [x, y] = self.basis();
        let yc = y.conjugate();
        IntegralIdeal::from_module(
            self.field,
            [(x.p().clone(), BigInt::zero()), (yc.p().clone(), yc.q().clone())],
        )
        .expect("conjugate of a nonzero ideal")
    }

    /// Exact quotient `self / other`; requires `self ⊆ other`.
    pub fn quotient(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if !other.contains(self) {
            return Err(Error::InvalidArgument(format!(
                "{other} does not divide {self}"
            )));
        }
        if other.is_unit() {
            return Ok(self.clone());
        }
        if self.field.is_rational() {
            return Ok(IntegralIdeal::unit(self.field).with_a(&self.a / &other.a));
        }
        let prod = self.mul(&other.conjugate())?;
        let n = other.norm();
        IntegralIdeal::from_module(
            self.field,
            [
                (&prod.a / &n, BigInt::zero()),
                (&prod.b / &n, &prod.c / &n),
            ],
        )
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = IntegralIdeal::unit(self.field);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Text form `(g1, g2)` with elements printed canonically.
    pub fn generator_form(&self) -> String {
        if self.field.is_rational() || self.is_unit() {
            return format!("({})", self.a);
        }
        let [x, y] = self.basis();
        format!("({x}, {y})")
    }
}

/// HNF text `[a, b+c*w]`; ideals of `Z` print as `(a)`.
impl fmt::Display for IntegralIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_rational() {
            write!(f, "({})", self.a)
        } else {
            write!(f, "[{}, {}+{}*w]", self.a, self.b, self.c)
        }
    }
}

/// Parse `[a, b+c*w]` (validated HNF) or a generator list `(g1, ..., gk)`.
pub fn parse_ideal(field: Field, text: &str) -> Result<IntegralIdeal> {
    let s = text.trim();
    let perr = |msg: &str| Error::Parse {
        pos: 0,
        msg: msg.to_string(),
    };
    let (open, close) = match s.chars().next() {
        Some('[') => ('[', ']'),
        Some('(') => ('(', ')'),
        _ => return Err(perr("ideal must start with '[' or '('")),
    };
    if !s.ends_with(close) || matching_close(s) != Some(s.len() - 1) {
        return Err(perr("unbalanced ideal brackets"));
    }
    let inner = &s[1..s.len() - 1];
    let parts = split_top_level(inner);
    let elems = parts
        .iter()
        .map(|p| parse_element(field, p))
        .collect::<Result<Vec<_>>>()?;
    if open == '[' {
        let [a, y] = elems.as_slice() else {
            return Err(perr("HNF form needs exactly two entries"));
        };
        let a = a
            .as_rational()
            .filter(|r| r.is_integer())
            .ok_or_else(|| perr("first HNF entry must be an integer"))?
            .to_integer();
        let y = y.coerce(field)?;
        if !y.is_integral() {
            return Err(Error::NotIntegral);
        }
        let (b, c) = if field.is_rational() {
            (BigInt::zero(), BigInt::one())
        } else {
            (y.p().clone(), y.q().clone())
        };
        return IntegralIdeal::from_hnf(field, a, b, c);
    }
    IntegralIdeal::from_generators(field, &elems)
}

fn matching_close(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
