use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with dyadic endpoints, produced by outward
/// rounding at `precision_bits` significant bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

impl RealInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, precision_bits: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RealInterval {
            lo,
            hi,
            precision_bits,
        }
    }

    pub fn exact(x: Dyadic, precision_bits: u32) -> Self {
        RealInterval::new(x.clone(), x, precision_bits)
    }

    pub fn from_int(n: impl Into<BigInt>, precision_bits: u32) -> Self {
        RealInterval::exact(Dyadic::from_int(n), precision_bits)
    }

    pub fn from_rational(r: &BigRational, precision_bits: u32) -> Self {
        if r.is_integer() {
            return RealInterval::from_int(r.to_integer(), precision_bits);
        }
        RealInterval::new(
            Dyadic::from_ratio(r, precision_bits, Round::Down),
            Dyadic::from_ratio(r, precision_bits, Round::Up),
            precision_bits,
        )
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> Dyadic {
        Dyadic::max(&self.lo.abs(), &self.hi.abs())
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    pub fn overlaps(&self, other: &RealInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &RealInterval) -> Option<RealInterval> {
        let lo = Dyadic::max(&self.lo, &other.lo);
        let hi = Dyadic::min(&self.hi, &other.hi);
        (lo <= hi).then(|| RealInterval::new(lo, hi, self.precision_bits))
    }

    pub fn with_precision(&self, precision_bits: u32) -> RealInterval {
        RealInterval::new(
            self.lo.round(precision_bits, Round::Down),
            self.hi.round(precision_bits, Round::Up),
            precision_bits,
        )
    }

    fn rounded(lo: Dyadic, hi: Dyadic, bits: u32) -> RealInterval {
        RealInterval::new(lo.round(bits, Round::Down), hi.round(bits, Round::Up), bits)
    }

    fn bits_with(&self, other: &RealInterval) -> u32 {
        self.precision_bits.min(other.precision_bits)
    }

    pub fn add(&self, other: &RealInterval) -> RealInterval {
        RealInterval::rounded(
            &self.lo + &other.lo,
            &self.hi + &other.hi,
            self.bits_with(other),
        )
    }

    pub fn sub(&self, other: &RealInterval) -> RealInterval {
        RealInterval::rounded(
            &self.lo - &other.hi,
            &self.hi - &other.lo,
            self.bits_with(other),
        )
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval::new(-&self.hi, -&self.lo, self.precision_bits)
    }

    pub fn mul(&self, other: &RealInterval) -> RealInterval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        RealInterval::rounded(lo, hi, self.bits_with(other))
    }

    pub fn mul_pow2(&self, k: i64) -> RealInterval {
        RealInterval::new(self.lo.mul_pow2(k), self.hi.mul_pow2(k), self.precision_bits)
    }

    pub fn abs(&self) -> RealInterval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            self.neg()
        } else {
            RealInterval::new(Dyadic::zero(), self.mag(), self.precision_bits)
        }
    }

    /// Division; fails when the divisor interval contains zero.
    pub fn div(&self, other: &RealInterval) -> Result<RealInterval> {
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let bits = self.bits_with(other);
        let cands_lo = [
            Dyadic::div_round(&self.lo, &other.lo, bits, Round::Down),
            Dyadic::div_round(&self.lo, &other.hi, bits, Round::Down),
            Dyadic::div_round(&self.hi, &other.lo, bits, Round::Down),
            Dyadic::div_round(&self.hi, &other.hi, bits, Round::Down),
        ];
        let cands_hi = [
            Dyadic::div_round(&self.lo, &other.lo, bits, Round::Up),
            Dyadic::div_round(&self.lo, &other.hi, bits, Round::Up),
            Dyadic::div_round(&self.hi, &other.lo, bits, Round::Up),
            Dyadic::div_round(&self.hi, &other.hi, bits, Round::Up),
        ];
        Ok(RealInterval::new(
            cands_lo.iter().min().unwrap().clone(),
            cands_hi.iter().max().unwrap().clone(),
            bits,
        ))
    }

    pub fn div_int(&self, n: u64) -> RealInterval {
        let d = Dyadic::from_int(n);
        let bits = self.precision_bits;
        RealInterval::new(
            Dyadic::div_round(&self.lo, &d, bits, Round::Down),
            Dyadic::div_round(&self.hi, &d, bits, Round::Up),
            bits,
        )
    }

    /// Widen both endpoints by `err >= 0`.
    pub fn widen(&self, err: &Dyadic) -> RealInterval {
        RealInterval::rounded(&self.lo - err, &self.hi + err, self.precision_bits)
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval::new(
            Dyadic::min(&self.lo, &other.lo),
            Dyadic::max(&self.hi, &other.hi),
            self.bits_with(other),
        )
    }

    /// Integer power `x^n`, `n >= 0`, tight for intervals straddling zero.
    pub fn pow_u(&self, n: u64) -> RealInterval {
        if n == 0 {
            return RealInterval::from_int(1, self.precision_bits);
        }
        if n % 2 == 0 {
            let a = self.abs();
            return a.pow_u_positive(n);
        }
        if self.lo.signum() >= 0 {
            return self.pow_u_positive(n);
        }
        if self.hi.signum() <= 0 {
            return self.neg().pow_u_positive(n).neg();
        }
        self.mul(&self.abs().pow_u_positive(n - 1))
    }

    fn pow_u_positive(&self, mut n: u64) -> RealInterval {
        let mut base = self.clone();
        let mut acc = RealInterval::from_int(1, self.precision_bits);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Square root of a non-negative interval.
    pub fn sqrt(&self) -> Result<RealInterval> {
        if self.lo.signum() < 0 {
            return Err(Error::NonPositiveLog);
        }
        let bits = self.precision_bits;
        let lo = sqrt_point(&self.lo, bits);
        let hi = sqrt_point(&self.hi, bits);
        Ok(RealInterval::new(lo.lo, hi.hi, bits))
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self) -> Result<RealInterval> {
        if self.lo.signum() <= 0 {
            return Err(Error::NonPositiveLog);
        }
        let bits = self.precision_bits;
        if self.lo == self.hi {
            return Ok(ln_point(&self.lo, bits));
        }
        let lo = ln_point(&self.lo, bits);
        let hi = ln_point(&self.hi, bits);
        Ok(RealInterval::new(lo.lo, hi.hi, bits))
    }

    pub fn exp(&self) -> Result<RealInterval> {
        let bits = self.precision_bits;
        if self.lo == self.hi {
            return exp_point(&self.lo, bits);
        }
        let lo = exp_point(&self.lo, bits)?;
        let hi = exp_point(&self.hi, bits)?;
        Ok(RealInterval::new(lo.lo, hi.hi, bits))
    }

    /// `x^r` for a positive interval and rational exponent.
    pub fn pow_rational(&self, r: &BigRational) -> Result<RealInterval> {
        if r.is_integer() {
            let n = r.to_integer();
            let e = n.abs().to_u64().ok_or_else(|| {
                Error::InvalidArgument(format!("exponent {n} too large"))
            })?;
            let p = self.pow_u(e);
            return if n.is_negative() {
                RealInterval::from_int(1, self.precision_bits).div(&p)
            } else {
                Ok(p)
            };
        }
        if !self.is_positive() {
            return Err(Error::NonPositiveLog);
        }
        let r = RealInterval::from_rational(r, self.precision_bits);
        self.ln()?.mul(&r).exp()
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

/// Truncation tail bound for an alternating-free geometric series with
/// first omitted term magnitude `term` and ratio at most `ratio < 1`.
fn geometric_tail(term: &Dyadic, ratio: f64) -> Dyadic {
    // term / (1 - ratio) <= term * 2^k where 2^k >= 1/(1-ratio)
    let k = (1.0 / (1.0 - ratio)).log2().ceil() as i64 + 1;
    term.abs().mul_pow2(k)
}

/// ln 2 = 2 atanh(1/3), cached per precision.
pub fn ln2(bits: u32) -> RealInterval {
    type Cache = Mutex<HashMap<u32, RealInterval>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("ln2 cache").get(&bits) {
        return v.clone();
    }
    let v = ln2_uncached(bits);
    cache.lock().expect("ln2 cache").insert(bits, v.clone());
    v
}

fn ln2_uncached(bits: u32) -> RealInterval {
    let w = bits + 16;
    let third = RealInterval::from_rational(&BigRational::new(1.into(), 3.into()), w);
    atanh_series(&third, w).mul_pow2(1).with_precision(bits)
}

/// `atanh(z)` for `|z| <= 1/3`.
fn atanh_series(z: &RealInterval, w: u32) -> RealInterval {
    let z2 = z.mul(z);
    let ratio = z2.mag().to_f64();
    debug_assert!(ratio < 0.12);
    let mut power = z.clone();
    let mut sum = z.clone();
    let eps = Dyadic::pow2(-(w as i64) - 8);
    let mut j: u64 = 1;
    loop {
        power = power.mul(&z2);
        let term = power.div_int(2 * j + 1);
        if term.mag() < eps {
            return sum.widen(&geometric_tail(&term.mag(), ratio));
        }
        sum = sum.add(&term);
        j += 1;
    }
}

/// Memoized: the same integers recur across height computations.
fn ln_point(x: &Dyadic, bits: u32) -> RealInterval {
    type Cache = Mutex<HashMap<(BigInt, i64, u32), RealInterval>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (x.mantissa().clone(), x.exponent(), bits);
    if let Some(v) = cache.lock().expect("ln cache").get(&key) {
        return v.clone();
    }
    let v = ln_point_uncached(x, bits);
    let mut c = cache.lock().expect("ln cache");
    if c.len() >= 1 << 16 {
        c.clear();
    }
    c.insert(key, v.clone());
    v
}

fn ln_point_uncached(x: &Dyadic, bits: u32) -> RealInterval {
    debug_assert!(x.signum() > 0);
    let w = bits + 24;
    let mut k = x.magnitude();
    let mut y = x.mul_pow2(-k); // [1/2, 1)
    if y < Dyadic::new(3.into(), -2) {
        y = y.mul_pow2(1);
        k -= 1;
    }
    if y == Dyadic::one() && k == 0 {
        return RealInterval::from_int(0, bits);
    }
    let one = Dyadic::one();
    let num = RealInterval::exact(&y - &one, w);
    let den = RealInterval::exact(&y + &one, w);
    let z = num.div(&den).expect("y + 1 > 0");
    let mut result = atanh_series(&z, w).mul_pow2(1);
    if k != 0 {
        let l2 = ln2(w + 64 - (k.unsigned_abs().leading_zeros()));
        result = result.add(&l2.mul(&RealInterval::from_int(k, w + 64)));
    }
    result.with_precision(bits)
}

fn exp_point(x: &Dyadic, bits: u32) -> Result<RealInterval> {
    if x.is_zero() {
        return Ok(RealInterval::from_int(1, bits));
    }
    if x.magnitude() > 40 {
        return Err(Error::InvalidArgument("exponent argument too large".into()));
    }
    const HALVINGS: i64 = 12;
    let w = bits + 32 + HALVINGS as u32;
    let k = (x.to_f64() / std::f64::consts::LN_2).round() as i64;
    let mut r = RealInterval::exact(x.clone(), w + 48);
    if k != 0 {
        let l2 = ln2(w + 48);
        r = r.sub(&l2.mul(&RealInterval::from_int(k, w + 48)));
    }
    let r = r.with_precision(w).mul_pow2(-HALVINGS);
    let ratio = r.mag().to_f64();
    let mut term = RealInterval::from_int(1, w);
    let mut sum = term.clone();
    let eps = Dyadic::pow2(-(w as i64) - 8);
    let mut j: u64 = 1;
    loop {
        term = term.mul(&r).div_int(j);
        if term.mag() < eps {
            // remaining terms shrink by at least ratio / (j + 1)
            sum = sum.widen(&geometric_tail(&term.mag(), ratio / (j + 1) as f64));
            break;
        }
        sum = sum.add(&term);
        j += 1;
    }
    for _ in 0..HALVINGS {
        sum = sum.mul(&sum);
    }
    Ok(sum.mul_pow2(k).with_precision(bits))
}

/// Enclosure of `sqrt(c)` by interval Newton iteration on `x^2 - c`.
fn sqrt_point(c: &Dyadic, bits: u32) -> RealInterval {
    if c.is_zero() {
        return RealInterval::from_int(0, bits);
    }
    assert!(c.signum() > 0);
    let w = bits + 8;
    // c = c' * 4^j with c' in [1, 4)
    let mut j = (c.magnitude() - 1).div_euclid(2);
    let mut cp = c.mul_pow2(-2 * j);
    if cp < Dyadic::one() {
        cp = cp.mul_pow2(2);
        j -= 1;
    }
    let approx = cp.to_f64().sqrt();
    let mut lo = Dyadic::from_f64(approx * (1.0 - 1e-12));
    let mut hi = Dyadic::from_f64(approx * (1.0 + 1e-12));
    if &lo * &lo > cp || &hi * &hi < cp {
        lo = Dyadic::one();
        hi = Dyadic::from_int(2);
    }
    let mut x = RealInterval::new(lo, hi, w);
    let target = Dyadic::pow2(-(w as i64));
    for _ in 0..80 {
        let m = x.mid().round(w + 4, Round::Down);
        let num = RealInterval::exact(&(&m * &m) - &cp, w);
        let den = x.mul_pow2(1);
        let q = num.div(&den).expect("interval bounded away from zero");
        let newton = RealInterval::exact(m, w).sub(&q);
        let next = match x.intersect(&newton) {
            Some(n) => n,
            None => break,
        };
        let done = next == x || next.width() <= target;
        x = next;
        if done {
            break;
        }
    }
    x.mul_pow2(j).with_precision(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: &RealInterval) -> (f64, f64) {
        (i.lo().to_f64(), i.hi().to_f64())
    }

    #[test]
    fn ln2_value() {
        let l = ln2(128);
        let (lo, hi) = f(&l);
        assert!(lo <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= hi);
        assert!(l.width() <= Dyadic::pow2(-125));
    }

    #[test]
    fn ln_and_exp_are_inverse() {
        for x in [0.001, 0.5, 1.0, 2.0, 3.7, 1e6] {
            let i = RealInterval::exact(Dyadic::from_f64(x), 128);
            let l = i.ln().unwrap();
            let back = l.exp().unwrap();
            assert!(back.contains(&Dyadic::from_f64(x)), "x={x} back={back}");
            assert!((l.to_f64() - x.ln()).abs() < 1e-15 * x.ln().abs().max(1.0));
        }
    }

    #[test]
    fn sqrt_newton_encloses() {
        for n in [2i64, 3, 5, 8, 1_000_003, 163] {
            let s = RealInterval::from_int(n, 200).sqrt().unwrap();
            let sq = s.mul(&s);
            assert!(sq.contains(&Dyadic::from_int(n)));
            assert!(s.width() <= Dyadic::pow2(-190).mul_pow2(s.hi().magnitude()));
        }
        let tiny = RealInterval::exact(Dyadic::pow2(-301), 128).sqrt().unwrap();
        assert!(tiny.mul(&tiny).contains(&Dyadic::pow2(-301)));
    }

    #[test]
    fn rational_power() {
        let x = RealInterval::from_int(9, 128);
        let half = BigRational::new(1.into(), 2.into());
        let r = x.pow_rational(&half).unwrap();
        assert!(r.contains(&Dyadic::from_int(3)));
        let inv = x.pow_rational(&BigRational::from_integer((-2).into())).unwrap();
        assert!((inv.to_f64() - 1.0 / 81.0).abs() < 1e-17);
    }

    #[test]
    fn ln_rejects_nonpositive() {
        assert_eq!(
            RealInterval::from_int(0, 64).ln().unwrap_err(),
            Error::NonPositiveLog
        );
    }
}
