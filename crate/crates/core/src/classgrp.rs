//! Principality of ideals, class numbers and minimal-height generators.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{ceil_sqrt, primes_up_to};
use crate::error::{Error, Result};
use crate::ideals::{prime_split, FractionalIdealRatio, IntegralIdeal};
use crate::qfield::{compare_heights, weil_height, Field, FieldElement};
use crate::realnum::{eval_log_expr, CompareConfig, Comparison, LogExpr};
use crate::units::{fundamental_unit, solve_norm_for_p};

/// Class-number facts for one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub field: Field,
    /// A rational upper bound for the Minkowski bound.
    pub minkowski_bound: BigRational,
    /// Known for `Q` and imaginary quadratic fields.
    pub class_number: Option<u64>,
    pub class_number_one: bool,
    pub nonprincipal_witness: Option<IntegralIdeal>,
}

/// `sqrt(D)/2` for real fields and `(2/pi) sqrt(|D|)` for imaginary ones, rounded up
/// to a rational (`212/333 > 2/pi`).
pub fn minkowski_bound(field: Field) -> BigRational {
    match field {
        Field::Rational => BigRational::one(),
        Field::Quadratic(k) => {
            let root = ceil_sqrt(&BigInt::from(k.discriminant().abs()));
            if k.is_real() {
                BigRational::new(root, 2.into())
            } else {
                BigRational::new(root * 212, 333.into())
            }
        }
    }
}

/// A generator of `I` if it is principal.
///
/// Searches elements of `I` with `|N| = N(I)`. In real fields a generator can be moved by
/// units to `|σ1| in [sqrt(N/E), sqrt(N E))`, which bounds `|q| sqrt(d) <= 2 sqrt(N E)`.
pub fn is_principal(ideal: &IntegralIdeal) -> Result<Option<FieldElement>> {
    let field = ideal.field();
    if field.is_rational() || ideal.is_unit() {
        return Ok(Some(FieldElement::from_int(field, ideal.a().clone())));
    }
    let n = ideal.norm();
    let k = field.quad().expect("quadratic");
    let (qmax, targets): (BigInt, Vec<BigInt>) = if k.is_real() {
        let e = fundamental_unit(field)?.to_f64_pair().0;
        let nf = n.to_f64().unwrap_or(f64::INFINITY);
        let b = 2.0 * (nf * e / k.d() as f64).sqrt() + 1.0;
        if !(b < 5e7) {
            return Err(Error::SearchLimit(format!(
                "principality search for {ideal} needs |q| up to {b:e}"
            )));
        }
        (BigInt::from(b.ceil() as i64), vec![n.clone(), -&n])
    } else {
        // |disc| q^2 <= 4 N
        let disc = BigInt::from(-k.discriminant());
        ((&n * 4u32 / disc).sqrt() + 1, vec![n.clone()])
    };
    let c = ideal.c();
    let mut q = BigInt::zero();
    while q <= qmax {
        let signs: &[i32] = if q.is_zero() { &[1] } else { &[1, -1] };
        for &s in signs {
            let qs = &q * s;
            for target in &targets {
                for p in solve_norm_for_p(field, &qs, target) {
                    let g = FieldElement::new(field, p, qs.clone(), BigInt::one()).expect("den = 1");
                    if ideal.contains_element(&g) {
                        return Ok(Some(g));
                    }
                }
            }
        }
        q += c;
    }
    Ok(None)
}

/// Number of reduced primitive forms of discriminant `D < 0`.
pub fn class_number(field: Field) -> Result<u64> {
    let d = match field {
        Field::Rational => return Ok(1),
        Field::Quadratic(k) if !k.is_real() => k.discriminant(),
        Field::Quadratic(k) => {
            return Err(Error::UnsupportedField(format!(
                "class numbers of real field {k} are not computed"
            )))
        }
    };
    let mut count = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (b.abs() == a || a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

type ClassCache = Mutex<HashMap<Field, ClassInfo>>;

fn class_cache() -> &'static ClassCache {
    static CACHE: OnceLock<ClassCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Class information, computed once per field.
pub fn class_info(field: Field) -> Result<ClassInfo> {
    if let Some(c) = class_cache().lock().expect("class cache").get(&field) {
        return Ok(c.clone());
    }
    let bound = minkowski_bound(field);
    let mut witness = None;
    let limit = bound.floor().to_integer().to_u64().unwrap_or(u64::MAX);
    if limit > 1_000_000 {
        return Err(Error::SearchLimit(format!("Minkowski bound {bound} is too large")));
    }
    'outer: for p in primes_up_to(limit) {
        for prime in prime_split(field, &BigInt::from(p))? {
            if is_principal(prime.ideal())?.is_none() {
                witness = Some(prime.ideal().clone());
                break 'outer;
            }
        }
    }
    let class_number = if field.is_real_quadratic() {
        None
    } else {
        Some(class_number(field)?)
    };
    let info = ClassInfo {
        field,
        minkowski_bound: bound,
        class_number,
        class_number_one: witness.is_none(),
        nonprincipal_witness: witness,
    };
    class_cache().lock().expect("class cache").insert(field, info.clone());
    Ok(info)
}

/// Every prime ideal below the Minkowski bound is principal.
pub fn class_number_one(field: Field) -> Result<bool> {
    Ok(class_info(field)?.class_number_one)
}

/// A generator of `J / J'`, both principal.
pub fn ratio_generator(r: &FractionalIdealRatio) -> Result<FieldElement> {
    let num = is_principal(r.numerator())?
        .ok_or_else(|| Error::NotPrincipal(r.numerator().to_string()))?;
    let den = is_principal(r.denominator())?
        .ok_or_else(|| Error::NotPrincipal(r.denominator().to_string()))?;
    num.try_div(&den)
}

/// A generator of `r` of least height among its unit multiples.
///
/// In rank 1 the height of `ε^l g` is convex in `l`; the search starts where the two
/// embeddings balance, walks downhill and checks both neighbours of the result.
pub fn minimal_height_generator(r: &FractionalIdealRatio) -> Result<FieldElement> {
    minimal_height_generator_with(r, &CompareConfig::default())
}

pub fn minimal_height_generator_with(r: &FractionalIdealRatio, cfg: &CompareConfig) -> Result<FieldElement> {
    let g0 = ratio_generator(r)?;
    minimize_over_units(&g0, cfg)
}

/// The least-height element among `±ε^l g`, with positive first embedding.
pub fn minimize_over_units(g0: &FieldElement, cfg: &CompareConfig) -> Result<FieldElement> {
    Ok(minimize_over_units_exp(g0, cfg)?.0)
}

/// As [`minimize_over_units`], also returning the exponent `l`.
pub fn minimize_over_units_exp(g0: &FieldElement, cfg: &CompareConfig) -> Result<(FieldElement, i64)> {
    let field = g0.field();
    if !field.is_real_quadratic() {
        return Ok((g0.clone(), 0));
    }
    let e = fundamental_unit(field)?;
    let log_e = eval_log_expr(&LogExpr::log(e.abs_embedding(0)?), 64)?.to_f64();
    let l1 = eval_log_expr(&LogExpr::log(g0.abs_embedding(0)?), 64)?.to_f64();
    let l2 = eval_log_expr(&LogExpr::log(g0.abs_embedding(1)?), 64)?.to_f64();
    let mut l = ((l2 - l1) / (2.0 * log_e)).round() as i64;
    let at = |l: i64| -> Result<FieldElement> { Ok(&e.pow(l)? * g0) };
    let mut best = at(l)?;
    let mut best_h = weil_height(&best)?;
    for step in [1i64, -1] {
        loop {
            let cand = at(l + step)?;
            let h = weil_height(&cand)?;
            if compare_heights(&h, &best_h, cfg)? == Comparison::Less {
                l += step;
                best = cand;
                best_h = h;
            } else {
                break;
            }
        }
    }
    for step in [1i64, -1] {
        let h = weil_height(&at(l + step)?)?;
        if compare_heights(&h, &best_h, cfg)? == Comparison::Less {
            return Err(Error::Inconsistent(format!(
                "height is not minimal at unit exponent {l}"
            )));
        }
    }
    if best.embedding_signs().is_some_and(|s| s[0] < 0) {
        best = -best;
    }
    Ok((best, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{coprime_split, parse_ideal};
    use crate::qfield::parse_element;
    use num_traits::Signed;

    fn k(d: i64) -> Field {
        Field::quadratic(d).unwrap()
    }

    #[test]
    fn known_principality() {
        for f in [k(-1), k(2), k(-5)] {
            let g = is_principal(&parse_ideal(f, "(6)").unwrap()).unwrap().unwrap();
            assert_eq!(g.norm().abs(), BigRational::from_integer(36.into()));
        }
        let f = k(-5);
        assert!(is_principal(&parse_ideal(f, "(2, 1+sqrt(-5))").unwrap()).unwrap().is_none());
        let f = k(-1);
        let g = is_principal(&parse_ideal(f, "(2, 1+i)").unwrap()).unwrap().unwrap();
        assert_eq!(g.norm(), BigRational::from_integer(2.into()));
    }

    #[test]
    fn known_class_numbers() {
        assert!(class_number_one(k(-163)).unwrap());
        assert!(!class_number_one(k(-5)).unwrap());
        assert_eq!(
            class_info(k(-5)).unwrap().nonprincipal_witness,
            Some(parse_ideal(k(-5), "(2, 1+sqrt(-5))").unwrap())
        );
        assert!(class_number_one(k(2)).unwrap());
        assert!(!class_number_one(k(10)).unwrap());
        assert_eq!(class_number(k(-1)).unwrap(), 1);
        assert_eq!(class_number(k(-5)).unwrap(), 2);
        assert_eq!(class_number(k(-23)).unwrap(), 3);
        assert!(class_number(k(3)).is_err());
    }

    #[test]
    fn known_minimal_generators() {
        let f = k(-1);
        let g = minimal_height_generator(&coprime_split(&parse_element(f, "2").unwrap()).unwrap()).unwrap();
        assert_eq!(g.norm(), BigRational::from_integer(4.into()));
        let f = k(2);
        let x = parse_element(f, "sqrt(2)*(1+sqrt(2))^3").unwrap();
        let g = minimal_height_generator(&coprime_split(&x).unwrap()).unwrap();
        assert_eq!(g.to_string(), "sqrt(2)");
        let one = minimal_height_generator(&FractionalIdealRatio::unit(f)).unwrap();
        assert!(one.is_one());
    }
}
