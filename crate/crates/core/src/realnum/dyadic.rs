use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// An exact dyadic rational `mant * 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Dyadic::new(BigInt::one(), 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    pub fn pow2(e: i64) -> Self {
        Dyadic::new(BigInt::one(), e)
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite float");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.mant.abs(), self.exp)
    }

    /// Position of the leading bit: `|x|` lies in `[2^(m-1), 2^m)`.
    pub fn magnitude(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        Dyadic::new(self.mant.clone(), self.exp + k)
    }

    /// Round to at most `bits` significant bits in the given direction.
    pub fn round(&self, bits: u32, dir: Round) -> Dyadic {
        let len = self.mant.bits() as i64;
        let excess = len - bits as i64;
        if excess <= 0 {
            return self.clone();
        }
        let mant = match dir {
            Round::Down => &self.mant >> excess as usize,
            Round::Up => -((-&self.mant) >> excess as usize),
        };
        Dyadic::new(mant, self.exp + excess)
    }

    /// Round to an absolute grid of `2^-frac_bits`.
    pub fn round_abs(&self, frac_bits: i64, dir: Round) -> Dyadic {
        let shift = -frac_bits - self.exp;
        if shift <= 0 {
            return self.clone();
        }
        let mant = match dir {
            Round::Down => &self.mant >> shift as usize,
            Round::Up => -((-&self.mant) >> shift as usize),
        };
        Dyadic::new(mant, -frac_bits)
    }

    /// `num / den` rounded in direction `dir` to about `bits` significant bits.
    pub fn div_round(num: &Dyadic, den: &Dyadic, bits: u32, dir: Round) -> Dyadic {
        assert!(!den.is_zero(), "dyadic division by zero");
        if num.is_zero() {
            return Dyadic::zero();
        }
        let shift = (bits as i64 + 2 + den.mant.bits() as i64 - num.mant.bits() as i64).max(0);
        let n = &num.mant << shift as usize;
        let (q, r) = n.div_mod_floor(&den.mant);
        let q = match dir {
            Round::Down => q,
            Round::Up if r.is_zero() => q,
            Round::Up => q + 1,
        };
        Dyadic::new(q, num.exp - den.exp - shift).round(bits, dir)
    }

    /// `n / d` for integers, rounded in direction `dir`.
    pub fn from_ratio(r: &BigRational, bits: u32, dir: Round) -> Dyadic {
        Dyadic::div_round(
            &Dyadic::from_int(r.numer().clone()),
            &Dyadic::from_int(r.denom().clone()),
            bits,
            dir,
        )
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let len = self.mant.bits() as i64;
        let drop = (len - 60).max(0);
        let m = (&self.mant >> drop as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + drop;
        if e > 1100 {
            return m.signum() * f64::INFINITY;
        }
        if e < -1200 {
            return 0.0;
        }
        // split the scaling so neither factor overflows or flushes to zero
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            &self.mant >> (-self.exp) as usize
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn min(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn align(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
    let e = a.exp.min(b.exp);
    (
        &a.mant << (a.exp - e) as usize,
        &b.mant << (b.exp - e) as usize,
        e,
    )
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (s, o) = (self.signum(), other.signum());
        if s != o {
            return s.cmp(&o);
        }
        if s == 0 {
            return Ordering::Equal;
        }
        // same sign: magnitudes decide unless equal
        let (ms, mo) = (self.magnitude(), other.magnitude());
        if ms != mo {
            return if s > 0 { ms.cmp(&mo) } else { mo.cmp(&ms) };
        }
        let (a, b, _) = align(self, other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = align(self, rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-&self.mant, self.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roundtrip_and_order() {
        for x in [0.0, 1.0, -2.5, 1e-300, 3.141592653589793, -7e200] {
            let d = Dyadic::from_f64(x);
            assert_eq!(d.to_f64(), x);
        }
        assert!(Dyadic::from_f64(-1.0) < Dyadic::from_f64(0.5));
        assert!(Dyadic::from_f64(1e-10) < Dyadic::from_f64(1e-9));
        assert!(Dyadic::from_f64(-1e-9) < Dyadic::from_f64(-1e-10));
        assert_eq!(Dyadic::new(BigInt::from(4), 0), Dyadic::new(BigInt::from(1), 2));
    }

    #[test]
    fn directed_rounding_brackets() {
        let x = Dyadic::new(BigInt::from(0b1011_0111), -3);
        let lo = x.round(3, Round::Down);
        let hi = x.round(3, Round::Up);
        assert!(lo <= x && x <= hi);
        assert!(hi.mantissa().bits() <= 4);
        let neg = -&x;
        assert!(neg.round(3, Round::Down) <= neg && neg <= neg.round(3, Round::Up));
    }

    #[test]
    fn division_brackets_one_third() {
        let one = Dyadic::one();
        let three = Dyadic::from_int(3);
        let lo = Dyadic::div_round(&one, &three, 64, Round::Down);
        let hi = Dyadic::div_round(&one, &three, 64, Round::Up);
        assert!(&lo * &three <= one);
        assert!(&hi * &three >= one);
        assert!(lo < hi);
    }
}
