use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::IntegralIdeal;
use crate::arith::{factor, is_prime, kronecker, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::qfield::{Field, FieldElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        })
    }
}

/// A prime ideal above the rational prime `p`.
///
/// Orders by `p`, then by the HNF of the ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdeal {
    p: BigInt,
    ideal: IntegralIdeal,
    split_type: SplitType,
}

impl PrimeIdeal {
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn split_type(&self) -> SplitType {
        self.split_type
    }

    pub fn ideal(&self) -> &IntegralIdeal {
        &self.ideal
    }

    pub fn norm(&self) -> BigInt {
        self.ideal.norm()
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ideal.fmt(f)
    }
}

type SplitCache = Mutex<HashMap<(Field, BigInt), Vec<PrimeIdeal>>>;

fn split_cache() -> &'static SplitCache {
    static CACHE: OnceLock<SplitCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The primes of `O_K` above `p`, sorted.
pub fn prime_split(field: Field, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if p < &BigInt::from(2) || !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let key = (field, p.clone());
    if let Some(v) = split_cache().lock().expect("split cache").get(&key) {
        return Ok(v.clone());
    }
    let primes = compute_split(field, p)?;
    let mut cache = split_cache().lock().expect("split cache");
    if cache.len() > 100_000 {
        cache.clear();
    }
    cache.insert(key, primes.clone());
    Ok(primes)
}

fn compute_split(field: Field, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if field.is_rational() {
        return Ok(vec![PrimeIdeal {
            p: p.clone(),
            ideal: IntegralIdeal::from_int(field, p.clone())?,
            split_type: SplitType::Ramified,
        }]);
    }
    let disc = BigInt::from(field.discriminant());
    let split_type = match kronecker(&disc, p) {
        1 => SplitType::Split,
        0 => SplitType::Ramified,
        _ => SplitType::Inert,
    };
    if split_type == SplitType::Inert {
        return Ok(vec![PrimeIdeal {
            p: p.clone(),
            ideal: IntegralIdeal::from_int(field, p.clone())?,
            split_type,
        }]);
    }
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    let roots = roots_mod_p(&t, &n, p);
    let w = FieldElement::omega(field)?;
    let mut primes = Vec::new();
    for r in roots {
        let gen = &w - &FieldElement::from_int(field, r);
        let ideal = IntegralIdeal::from_generators(field, &[FieldElement::from_int(field, p.clone()), gen])?;
        debug_assert_eq!(&ideal.norm(), p);
        primes.push(PrimeIdeal {
            p: p.clone(),
            ideal,
            split_type,
        });
    }
    primes.sort();
    primes.dedup();
    Ok(primes)
}

/// Distinct roots of `X^2 - tX + n` modulo `p`.
fn roots_mod_p(t: &BigInt, n: &BigInt, p: &BigInt) -> Vec<BigInt> {
    if p.to_u64().is_some_and(|q| q <= 64) {
        let q = p.to_i64().expect("small");
        return (0..q)
            .map(BigInt::from)
            .filter(|x| ((x * x - t * x + n).mod_floor(p)).is_zero())
            .collect();
    }
    // p odd: X = (t ± sqrt(t^2 - 4n)) / 2
    let disc = (t * t - n * 4u32).mod_floor(p);
    let s = sqrt_mod_prime(&disc, p).expect("discriminant is a square mod p");
    let inv2 = (p + 1u32) / 2u32;
    let mut roots: Vec<BigInt> = [(t + &s), (t - &s)]
        .into_iter()
        .map(|v| (v * &inv2).mod_floor(p))
        .collect();
    roots.sort();
    roots.dedup();
    roots
}

/// Exponents over prime ideals; zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ValuationVector {
    entries: BTreeMap<PrimeIdeal, i64>,
}

impl ValuationVector {
    pub fn new() -> Self {
        ValuationVector::default()
    }

    pub fn single(p: PrimeIdeal, e: i64) -> Self {
        let mut v = ValuationVector::new();
        v.add_to(p, e);
        v
    }

    pub fn add_to(&mut self, p: PrimeIdeal, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.entries.entry(p.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.entries.remove(&p);
        }
    }

    pub fn get(&self, p: &PrimeIdeal) -> i64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PrimeIdeal, i64)> {
        self.entries.iter().map(|(p, &e)| (p, e))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, e) in other.iter() {
            out.add_to(p.clone(), e);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> Self {
        let mut out = ValuationVector::new();
        if k != 0 {
            for (p, e) in self.iter() {
                out.entries.insert(p.clone(), e * k);
            }
        }
        out
    }

    /// Exact division of every exponent by `g`.
    pub fn divided(&self, g: i64) -> Option<Self> {
        let mut out = ValuationVector::new();
        for (p, e) in self.iter() {
            if e % g != 0 {
                return None;
            }
            out.entries.insert(p.clone(), e / g);
        }
        Some(out)
    }

    pub fn positive_part(&self) -> Self {
        ValuationVector {
            entries: self.iter().filter(|(_, e)| *e > 0).map(|(p, e)| (p.clone(), e)).collect(),
        }
    }

    /// Absolute values of the negative exponents.
    pub fn negative_part(&self) -> Self {
        ValuationVector {
            entries: self.iter().filter(|(_, e)| *e < 0).map(|(p, e)| (p.clone(), -e)).collect(),
        }
    }

    /// Sum of absolute exponents.
    pub fn total_multiplicity(&self) -> u64 {
        self.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    /// `∏ P^e` for a vector with non-negative exponents.
    pub fn to_ideal(&self, field: Field) -> Result<IntegralIdeal> {
        let mut acc = IntegralIdeal::unit(field);
        for (p, e) in self.iter() {
            if e < 0 {
                return Err(Error::InvalidArgument(
                    "negative exponent in an integral ideal".into(),
                ));
            }
            acc = acc.mul(&p.ideal().pow(e as u32)?)?;
        }
        Ok(acc)
    }

    /// Norm of the positive part.
    pub fn norm_positive(&self) -> BigInt {
        self.iter()
            .filter(|(_, e)| *e > 0)
            .fold(BigInt::one(), |acc, (p, e)| acc * p.norm().pow(e as u32))
    }

    /// Norm of the negative part.
    pub fn norm_negative(&self) -> BigInt {
        self.negative_part().norm_positive()
    }

    /// `self[P] >= other[P]` for every prime.
    pub fn dominates(&self, other: &Self) -> bool {
        other.iter().all(|(p, e)| self.get(p) >= e)
            && self.iter().all(|(p, e)| e >= other.get(p))
    }
}

impl fmt::Display for ValuationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

/// Prime factorization of a nonzero integral ideal.
pub fn factor_ideal(x: &IntegralIdeal) -> Result<ValuationVector> {
    let field = x.field();
    let mut out = ValuationVector::new();
    if x.is_unit() {
        return Ok(out);
    }
    let mut rest = x.clone();
    for (p, _) in factor(&x.norm())? {
        for prime in prime_split(field, &p)? {
            let mut e = 0;
            while prime.ideal().contains(&rest) && !rest.is_unit() {
                rest = rest.quotient(prime.ideal())?;
                e += 1;
            }
            out.add_to(prime, e);
        }
    }
    debug_assert!(rest.is_unit());
    Ok(out)
}

impl IntegralIdeal {
    /// `v_P(self)`.
    pub fn valuation(&self, p: &PrimeIdeal) -> Result<i64> {
        let mut rest = self.clone();
        let mut e = 0;
        while !rest.is_unit() && p.ideal().contains(&rest) {
            rest = rest.quotient(p.ideal())?;
            e += 1;
        }
        Ok(e)
    }
}

impl FieldElement {
    /// Valuation vector of the principal fractional ideal `x*O_K`.
    pub fn valuations(&self) -> Result<ValuationVector> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let field = self.field();
        let den = FieldElement::from_int(field, self.den().clone());
        let num = self * &den;
        let top = factor_ideal(&IntegralIdeal::principal(&num)?)?;
        let bottom = factor_ideal(&IntegralIdeal::principal(&den)?)?;
        Ok(top.minus(&bottom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::parse_ideal;

    fn k(d: i64) -> Field {
        Field::quadratic(d).unwrap()
    }

    #[test]
    fn known_splitting() {
        let gi = k(-1);
        let five = prime_split(gi, &5.into()).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|p| p.split_type() == SplitType::Split));
        // sorted by HNF: [5, 2+1*w] = (5, i-3) comes first
        assert_eq!(five[0].ideal(), &parse_ideal(gi, "(5, i-3)").unwrap());
        assert_eq!(five[1].ideal(), &parse_ideal(gi, "(5, i-2)").unwrap());
        let prod = five[0].ideal().mul(five[1].ideal()).unwrap();
        assert_eq!(prod, IntegralIdeal::from_int(gi, 5).unwrap());

        let three = prime_split(k(2), &3.into()).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].split_type(), SplitType::Inert);
        assert_eq!(three[0].norm(), BigInt::from(9));

        let two = prime_split(gi, &2.into()).unwrap();
        assert_eq!(two[0].split_type(), SplitType::Ramified);
        assert_eq!(two[0].ideal(), &parse_ideal(gi, "(2, 1+i)").unwrap());
        assert_eq!(prime_split(gi, &6.into()), Err(Error::NotPrime(6.into())));
    }

    #[test]
    fn known_factorizations() {
        let gi = k(-1);
        assert!(factor_ideal(&IntegralIdeal::unit(gi)).unwrap().is_empty());
        let v = factor_ideal(&IntegralIdeal::from_int(gi, 6).unwrap()).unwrap();
        let two = &prime_split(gi, &2.into()).unwrap()[0];
        let three = &prime_split(gi, &3.into()).unwrap()[0];
        assert_eq!(v.get(two), 2);
        assert_eq!(v.get(three), 1);
        assert_eq!(v.len(), 2);
        let f = k(-5);
        let v = factor_ideal(&IntegralIdeal::from_int(f, 2).unwrap()).unwrap();
        let p = parse_ideal(f, "(2, 1+sqrt(-5))").unwrap();
        assert_eq!(v.iter().map(|(q, e)| (q.ideal().clone(), e)).collect::<Vec<_>>(), vec![(p, 2)]);
    }

    #[test]
    fn large_split_prime_uses_tonelli_shanks() {
        let f = k(-1);
        let p = BigInt::from(1_000_000_009u64);
        let ps = prime_split(f, &p).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].ideal().mul(ps[1].ideal()).unwrap(), IntegralIdeal::from_int(f, p).unwrap());
    }

    #[test]
    fn element_valuations() {
        let f = k(-5);
        let x = crate::qfield::parse_element(f, "(1+sqrt(-5))/2").unwrap();
        let v = x.valuations().unwrap();
        assert_eq!(v.total_multiplicity(), 2);
        assert_eq!(v.norm_positive(), BigInt::from(3));
        assert_eq!(v.norm_negative(), BigInt::from(2));
    }
}
