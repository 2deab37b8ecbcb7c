//! Unit groups, balancing windows and the balancedness decision.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::exact_sqrt;
use crate::error::{Error, Result};
use crate::qfield::{Field, FieldElement, QuadField};
use crate::realnum::{compare_adaptive, surd_sign, Comparison, LogExpr, DEFAULT_TIE_TOLERANCE};

/// Torsion and free part of `O_K^×`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    pub field: Field,
    pub torsion_order: u32,
    pub fundamental_unit: Option<FieldElement>,
    pub rank: u32,
}

type UnitCache = Mutex<HashMap<QuadField, UnitGroup>>;

fn unit_cache() -> &'static UnitCache {
    static CACHE: OnceLock<UnitCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The unit group, computed once per field.
pub fn unit_group(field: Field) -> UnitGroup {
    let Field::Quadratic(k) = field else {
        return UnitGroup {
            field,
            torsion_order: 2,
            fundamental_unit: None,
            rank: 0,
        };
    };
    if let Some(g) = unit_cache().lock().expect("unit cache").get(&k) {
        return g.clone();
    }
    let g = if k.is_real() {
        UnitGroup {
            field,
            torsion_order: 2,
            fundamental_unit: Some(compute_fundamental_unit(k)),
            rank: 1,
        }
    } else {
        UnitGroup {
            field,
            torsion_order: roots_of_unity(field).len() as u32,
            fundamental_unit: None,
            rank: 0,
        }
    };
    unit_cache().lock().expect("unit cache").insert(k, g.clone());
    g
}

pub fn roots_of_unity(field: Field) -> Vec<FieldElement> {
    let one = FieldElement::one(field);
    let mut out = vec![one.clone(), -&one];
    match field.d() {
        Some(-1) => {
            let i = FieldElement::omega(field).expect("quadratic");
            out.push(i.clone());
            out.push(-i);
        }
        Some(-3) => {
            // w = (1+sqrt(-3))/2 is a primitive sixth root of unity
            let w = FieldElement::omega(field).expect("quadratic");
            let w2 = &w * &w;
            out.push(w.clone());
            out.push(-w);
            out.push(w2.clone());
            out.push(-w2);
        }
        _ => {}
    }
    out
}

/// The fundamental unit `ε` of a real quadratic field, with `σ1(ε) > 1`.
pub fn fundamental_unit(field: Field) -> Result<FieldElement> {
    unit_group(field)
        .fundamental_unit
        .ok_or_else(|| Error::UnsupportedField(format!("{field} has unit rank 0")))
}

/// Scan the continued fraction of `w` for the first convergent `p/q` with
/// `N((p - q*t) + q*w) = ±1`.
fn compute_fundamental_unit(k: QuadField) -> FieldElement {
    let field = Field::Quadratic(k);
    let t = BigInt::from(k.omega_trace());
    let d = BigInt::from(k.d());
    let s = d.sqrt();
    // w = (P + sqrt(D)) / Q
    let (mut pp, mut qq) = if k.omega_is_half() {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut kk) = (BigInt::one(), BigInt::zero());
    loop {
        let num = if qq.is_negative() { &pp + &s + 1 } else { &pp + &s };
        let a = num.div_floor(&qq);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &kk + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut kk, k_next);
        let eta = FieldElement::new(field, &h - &kk * &t, kk.clone(), BigInt::one())
            .expect("den = 1");
        if eta.norm().abs().is_one() {
            return eta;
        }
        pp = &a * &qq - &pp;
        qq = (&d - &pp * &pp) / &qq;
    }
}

/// `|σ_i(x)| >= 1`, decided exactly (`i` in {0, 1}).
pub fn embedding_at_least_one(x: &FieldElement, i: usize) -> bool {
    let (a, b) = x.sqrt_coords();
    let b = if i == 0 { b } else { -b };
    let r = BigInt::from(x.field().d().unwrap_or(0));
    let one = BigRational::one();
    surd_sign(&(&a - &one), &b, &r) >= 0 || surd_sign(&(&a + &one), &b, &r) <= 0
}

/// Integer interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, l: i64) -> bool {
        self.lo <= l && l <= self.hi
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo) as u64 + 1
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("empty")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

fn log_abs_embedding(x: &FieldElement, i: usize) -> Result<f64> {
    let e = LogExpr::log(x.abs_embedding(i)?);
    Ok(crate::realnum::eval_log_expr(&e, 64)?.to_f64())
}

/// All `l` with `|σ1(ε^l x)| >= 1` and `|σ2(ε^l x)| >= 1`.
///
/// Endpoints are estimated numerically and then fixed by exact sign tests, so a
/// boundary where `|σ_i(ε^l x)| = 1` is resolved exactly.
pub fn balancing_window(x: &FieldElement, unit: &FieldElement) -> Result<Window> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !x.field().is_real_quadratic() {
        return Err(Error::UnsupportedField(format!("{} has unit rank 0", x.field())));
    }
    if !x.is_integral() {
        return Err(Error::NotIntegral);
    }
    if !unit.is_unit() || !embedding_at_least_one(unit, 0) || unit.is_one() || (-unit).is_one() {
        return Err(Error::InvalidArgument(format!("{unit} is not a unit with |σ1| > 1")));
    }
    let log_e = log_abs_embedding(unit, 0)?;
    let l1 = (-log_abs_embedding(x, 0)? / log_e).ceil() as i64;
    let l2 = (log_abs_embedding(x, 1)? / log_e).floor() as i64;
    let at = |l: i64| -> Result<FieldElement> { Ok(&unit.pow(l)? * x) };
    // |σ1(ε^l x)| >= 1 is monotone increasing in l
    let mut lo = l1;
    while embedding_at_least_one(&at(lo - 1)?, 0) {
        lo -= 1;
    }
    while !embedding_at_least_one(&at(lo)?, 0) {
        lo += 1;
    }
    // |σ2(ε^l x)| >= 1 is monotone decreasing in l
    let mut hi = l2;
    while embedding_at_least_one(&at(hi + 1)?, 1) {
        hi += 1;
    }
    while !embedding_at_least_one(&at(hi)?, 1) {
        hi -= 1;
    }
    Ok(Window { lo, hi })
}

/// Outcome of the balancedness decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceVerdict {
    pub balanced: bool,
    /// A nonzero integer with no balancing unit, when unbalanced.
    pub witness: Option<FieldElement>,
    /// The sufficient criterion `0 < [K:Q] h(ε) <= log min_nonunit_norm`.
    pub criterion_holds: bool,
    /// The same criterion read with the strict lower bound `1 < [K:Q] h(ε)`.
    pub criterion_strict_holds: bool,
}

/// Solutions `p` of `p^2 + t*q*p + n*q^2 = target`.
pub(crate) fn solve_norm_for_p(field: Field, q: &BigInt, target: &BigInt) -> Vec<BigInt> {
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    // p = (-t q ± sqrt(t^2 q^2 - 4 (n q^2 - target))) / 2
    let tq = &t * q;
    let disc = &tq * &tq - (&n * q * q - target) * 4u32;
    let Some(s) = exact_sqrt(&disc) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for num in [-&tq + &s, -&tq - &s] {
        if num.is_even() {
            out.push(num / 2u32);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `floor(q * sqrt(d))` for `d > 0` not a square.
fn floor_q_sqrt_d(q: &BigInt, d: i64) -> BigInt {
    let r = (q * q * BigInt::from(d)).sqrt();
    if q.is_negative() {
        -r - 1
    } else {
        r
    }
}

/// Bound on `|q|` in a real-field enumeration: `ceil(x / sqrt(d))` plus slack.
fn q_bound(x: f64, d: i64) -> Result<i64> {
    let b = (x / (d as f64).sqrt()).ceil() + 2.0;
    if !(b < 5e7) {
        return Err(Error::SearchLimit(format!(
            "coefficient range {b:e} is too large to enumerate"
        )));
    }
    Ok(b as i64)
}

/// Smallest `n >= 2` that is `|N(y)|` for some `y` in `O_K`.
pub fn min_nonunit_norm(field: Field) -> Result<u32> {
    for n in 2u32..=4 {
        if has_element_of_norm(field, &BigInt::from(n))? {
            return Ok(n);
        }
    }
    unreachable!("N(2) = 4")
}

fn has_element_of_norm(field: Field, n: &BigInt) -> Result<bool> {
    match field {
        Field::Rational => Ok(true),
        Field::Quadratic(k) if k.is_real() => {
            // normalize by units to 1 <= |σ1| < E, so |σ2| <= n and |q| sqrt(d) <= E + n
            let e = fundamental_unit(field)?;
            let big_e = e.to_f64_pair().0;
            let qmax = q_bound(big_e + n.to_f64().unwrap_or(f64::INFINITY), k.d())?;
            for q in 0..=qmax {
                let q = BigInt::from(q);
                if !solve_norm_for_p(field, &q, n).is_empty() || !solve_norm_for_p(field, &q, &-n).is_empty() {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Field::Quadratic(k) => {
            // (p + tq/2)^2 + |disc| q^2 / 4 = n
            let disc = BigInt::from(-k.discriminant());
            let mut q = BigInt::zero();
            while &disc * &q * &q <= n * 4u32 {
                if !solve_norm_for_p(field, &q, n).is_empty() {
                    return Ok(true);
                }
                q += 1;
            }
            Ok(false)
        }
    }
}

/// The sufficient balancedness criterion for a rank-1 field, non-strict reading.
pub fn prelim_balanced_criterion(field: Field) -> Result<bool> {
    Ok(criterion_readings(field)?.0)
}

/// `(h(ε) > 0 and E <= m, 1 < log E and E <= m)` with `E = σ1(ε)`, `m` the minimal non-unit norm.
fn criterion_readings(field: Field) -> Result<(bool, bool)> {
    if !field.is_real_quadratic() {
        return Err(Error::UnsupportedField(format!("{field} has unit rank 0")));
    }
    let e = fundamental_unit(field)?;
    let m = min_nonunit_norm(field)?;
    let (a, b) = e.sqrt_coords();
    let r = BigInt::from(field.d().expect("quadratic"));
    // [K:Q] h(ε) = log E, and log E <= log m  <=>  m - E >= 0
    let bound = surd_sign(&(BigRational::from_integer(m.into()) - &a), &(-&b), &r) >= 0;
    let log_e = LogExpr::log(e.abs_embedding(0)?);
    let above_one = compare_adaptive(&log_e, &LogExpr::int(1), DEFAULT_TIE_TOLERANCE)? == Comparison::Greater;
    Ok((bound, bound && above_one))
}

/// Decide whether every nonzero `x` in `O_K` has a unit `u` with `|ux|_v >= 1` at every archimedean place.
pub fn is_field_balanced(field: Field) -> Result<BalanceVerdict> {
    if !field.is_real_quadratic() {
        return Ok(BalanceVerdict {
            balanced: true,
            witness: None,
            criterion_holds: false,
            criterion_strict_holds: false,
        });
    }
    let (criterion_holds, criterion_strict_holds) = criterion_readings(field)?;
    let witness = if criterion_holds {
        None
    } else {
        find_unbalanced(field)?
    };
    Ok(BalanceVerdict {
        balanced: witness.is_none(),
        witness,
        criterion_holds,
        criterion_strict_holds,
    })
}

/// Every `x` is a unit multiple (up to sign) of one with `1 <= σ1(x) < E`, whose window
/// is nonempty exactly when `|σ2(x)| >= 1`. Enumerate those with `|σ2(x)| < 1`.
fn find_unbalanced(field: Field) -> Result<Option<FieldElement>> {
    let d = field.d().expect("real field");
    let t = field.omega_trace();
    let e = fundamental_unit(field)?;
    let (ea, eb) = e.sqrt_coords();
    let r = BigInt::from(d);
    let one = BigRational::one();
    let qmax = q_bound(e.to_f64_pair().0 + 1.0, d)?;
    let mut best: Option<(BigInt, BigInt, BigInt, FieldElement)> = None;
    for qi in -qmax..=qmax {
        let q = BigInt::from(qi);
        // |σ2| < 1 pins p near (q sqrt(d) - q t) / 2 when t = 1, or q sqrt(d) when t = 0
        let f = floor_q_sqrt_d(&q, d);
        let centre = if t == 1 { (&f - &q).div_floor(&BigInt::from(2)) } else { f };
        for dp in -2i64..=2 {
            let p = &centre + dp;
            let x = FieldElement::new(field, p.clone(), q.clone(), BigInt::one()).expect("den = 1");
            if x.is_zero() {
                continue;
            }
            let (a, b) = x.sqrt_coords();
            let s1_ge_1 = surd_sign(&(&a - &one), &b, &r) >= 0;
            let s1_lt_e = surd_sign(&(&ea - &a), &(&eb - &b), &r) > 0;
            let nb = -&b;
            let s2_small = surd_sign(&(&a - &one), &nb, &r) < 0 && surd_sign(&(&a + &one), &nb, &r) > 0;
            if !(s1_ge_1 && s1_lt_e && s2_small) {
                continue;
            }
            let n = x.norm().abs().to_integer();
            if n < BigInt::from(2) {
                continue;
            }
            let key = (n, q.abs(), p);
            if best.as_ref().is_none_or(|b| (&key.0, &key.1, &key.2) < (&b.0, &b.1, &b.2)) {
                best = Some((key.0, key.1, key.2, x));
            }
        }
    }
    Ok(best.map(|b| b.3))
}
