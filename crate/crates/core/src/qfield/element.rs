use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Field;
use crate::error::{Error, Result};
use crate::realnum::{surd_sign, PositiveReal, RealInterval};

/// An element `(p + q*w)/den` of a field, kept with `gcd(p, q, den) = 1`, `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    p: BigInt,
    q: BigInt,
    den: BigInt,
}

impl FieldElement {
    pub fn new(field: Field, p: BigInt, q: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if field.is_rational() && !q.is_zero() {
            return Err(Error::InvalidArgument("rational field element with a w-part".into()));
        }
        Ok(FieldElement::normalized(field, p, q, den))
    }

    fn normalized(field: Field, mut p: BigInt, mut q: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            p = -p;
            q = -q;
            den = -den;
        }
        let g = p.gcd(&q).gcd(&den);
        if !g.is_one() && !g.is_zero() {
            p /= &g;
            q /= &g;
            den /= &g;
        }
        FieldElement { field, p, q, den }
    }

    pub fn from_int(field: Field, n: impl Into<BigInt>) -> Self {
        FieldElement::normalized(field, n.into(), BigInt::zero(), BigInt::one())
    }

    pub fn from_rational(field: Field, r: &BigRational) -> Self {
        FieldElement::normalized(field, r.numer().clone(), BigInt::zero(), r.denom().clone())
    }

    pub fn zero(field: Field) -> Self {
        FieldElement::from_int(field, 0)
    }

    pub fn one(field: Field) -> Self {
        FieldElement::from_int(field, 1)
    }

    /// The basis element `w`.
    pub fn omega(field: Field) -> Result<Self> {
        if field.is_rational() {
            return Err(Error::InvalidArgument("Q has no w".into()));
        }
        Ok(FieldElement::normalized(field, BigInt::zero(), BigInt::one(), BigInt::one()))
    }

    /// `a + b*sqrt(d)`.
    pub fn from_sqrt_coords(field: Field, a: &BigRational, b: &BigRational) -> Result<Self> {
        if b.is_zero() {
            return Ok(FieldElement::from_rational(field, a));
        }
        if field.is_rational() {
            return Err(Error::InvalidArgument("Q has no square root part".into()));
        }
        // common denominator m: a = A/m, b = B/m
        let m = a.denom().lcm(b.denom());
        let big_a = a.numer() * (&m / a.denom());
        let big_b = b.numer() * (&m / b.denom());
        if field.omega_trace() == 1 {
            // sqrt(d) = 2w - 1
            Ok(FieldElement::normalized(field, big_a - &big_b, big_b * 2, m))
        } else {
            Ok(FieldElement::normalized(field, big_a, big_b, m))
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.p.is_one() && self.q.is_zero() && self.den.is_one()
    }

    /// Lies in the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.p.clone(), self.den.clone()))
    }

    pub fn is_unit(&self) -> bool {
        self.is_integral() && self.norm().abs().is_one()
    }

    /// Same value viewed in `field` (only `Q` elements move between fields).
    pub fn coerce(&self, field: Field) -> Result<Self> {
        if self.field == field {
            return Ok(self.clone());
        }
        let joined = self.field.join(&field)?;
        if joined != field {
            return Err(Error::FieldMismatch(self.field.to_string(), field.to_string()));
        }
        Ok(FieldElement { field, ..self.clone() })
    }

    /// Coordinates `(a, b)` with the value `a + b*sqrt(d)`.
    pub fn sqrt_coords(&self) -> (BigRational, BigRational) {
        if self.field.omega_trace() == 1 {
            let two_den = &self.den * 2u32;
            (
                BigRational::new(&self.p * 2u32 + &self.q, two_den.clone()),
                BigRational::new(self.q.clone(), two_den),
            )
        } else {
            (
                BigRational::new(self.p.clone(), self.den.clone()),
                BigRational::new(self.q.clone(), self.den.clone()),
            )
        }
    }

    pub fn conjugate(&self) -> Self {
        let t = self.field.omega_trace();
        FieldElement::normalized(
            self.field,
            &self.p + &self.q * t,
            -&self.q,
            self.den.clone(),
        )
    }

    pub fn norm(&self) -> BigRational {
        let t = self.field.omega_trace();
        let n = self.field.omega_norm();
        let num = &self.p * &self.p + &self.p * &self.q * t + &self.q * &self.q * n;
        BigRational::new(num, &self.den * &self.den)
    }

    pub fn trace(&self) -> BigRational {
        let t = self.field.omega_trace();
        BigRational::new(&self.p * 2 + &self.q * t, self.den.clone())
    }

    fn joined(&self, other: &Self) -> Result<Field> {
        self.field.join(&other.field)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let field = self.joined(other)?;
        Ok(FieldElement::normalized(
            field,
            &self.p * &other.den + &other.p * &self.den,
            &self.q * &other.den + &other.q * &self.den,
            &self.den * &other.den,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let field = self.joined(other)?;
        let t = field.omega_trace();
        let n = field.omega_norm();
        let qq = &self.q * &other.q;
        Ok(FieldElement::normalized(
            field,
            &self.p * &other.p - &qq * n,
            &self.p * &other.q + &other.p * &self.q + qq * t,
            &self.den * &other.den,
        ))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        // c / n, with n = nn/nd
        Ok(FieldElement::normalized(
            self.field,
            &c.p * n.denom(),
            &c.q * n.denom(),
            &c.den * n.numer(),
        ))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.joined(other)?;
        self.try_mul(&other.inverse()?)
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = FieldElement::one(self.field);
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Exact signs of the real embeddings (`sqrt(d) > 0` first); `None` for imaginary fields.
    pub fn embedding_signs(&self) -> Option<[i32; 2]> {
        let d = self.field.d().unwrap_or(0);
        if d < 0 {
            return None;
        }
        let (a, b) = self.sqrt_coords();
        let r = BigInt::from(d);
        Some([surd_sign(&a, &b, &r), surd_sign(&a, &(-&b), &r)])
    }

    /// `|sigma_i(x)|` as an exact positive real, `i` in {0, 1}; real fields and `Q` only.
    pub fn abs_embedding(&self, i: usize) -> Result<PositiveReal> {
        let d = self.field.d().unwrap_or(0);
        if d < 0 {
            return Err(Error::InvalidArgument("no real embedding".into()));
        }
        let (a, b) = self.sqrt_coords();
        let b = if i == 0 { b } else { -b };
        PositiveReal::abs_surd(a, b, BigInt::from(d)).map_err(|_| Error::ZeroInput)
    }

    /// Interval enclosures of the (unnormalized) real embeddings.
    pub fn embeddings(&self, bits: u32) -> Option<[RealInterval; 2]> {
        let d = self.field.d().unwrap_or(0);
        if d < 0 {
            return None;
        }
        let (a, b) = self.sqrt_coords();
        let ai = RealInterval::from_rational(&a, bits);
        let bi = RealInterval::from_rational(&b, bits);
        let root = RealInterval::from_int(d, bits).sqrt().expect("d >= 0");
        let br = bi.mul(&root);
        Some([ai.add(&br), ai.sub(&br)])
    }

    /// Approximate `(sigma_1, sigma_2)` for real fields or `(re, im)` for imaginary ones.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let (a, b) = self.sqrt_coords();
        let af = rat_f64(&a);
        let bf = rat_f64(&b);
        match self.field.d() {
            None => (af, af),
            Some(d) if d > 0 => {
                let r = (d as f64).sqrt();
                (af + bf * r, af - bf * r)
            }
            Some(d) => (af, bf * (-d as f64).sqrt()),
        }
    }
}

pub(crate) fn rat_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// The element operations in checked form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Conjugate,
    Negate,
}

/// Checked arithmetic; unary operations ignore `y`.
pub fn element_arith(x: &FieldElement, y: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => x.try_add(y),
        ArithOp::Sub => x.try_sub(y),
        ArithOp::Mul => x.try_mul(y),
        ArithOp::Div => x.try_div(y),
        ArithOp::Conjugate => Ok(x.conjugate()),
        ArithOp::Negate => Ok(-x),
    }
}

// The operator impls panic on a field mismatch; use the `try_` forms for checked use.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("field mismatch in +")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch in -")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch in *")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field,
            p: -&self.p,
            q: -&self.q,
            den: self.den.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: `a`, `a/b`, `A+B*sqrt(d)` or `(A+B*sqrt(d))/M`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.sqrt_coords();
        if b.is_zero() {
            return write_rational(f, &a);
        }
        let d = self.field.d().expect("irrational element of a quadratic field");
        let m = a.denom().lcm(b.denom());
        let big_a = a.numer() * (&m / a.denom());
        let big_b = b.numer() * (&m / b.denom());
        let root = format!("sqrt({d})");
        let surd = if big_b.is_one() {
            root
        } else if big_b == -BigInt::one() {
            format!("-{root}")
        } else {
            format!("{big_b}*{root}")
        };
        let body = if big_a.is_zero() {
            surd
        } else if big_b.is_negative() {
            format!("{big_a}{surd}")
        } else {
            format!("{big_a}+{surd}")
        };
        if m.is_one() {
            f.write_str(&body)
        } else {
            write!(f, "({body})/{m}")
        }
    }
}
