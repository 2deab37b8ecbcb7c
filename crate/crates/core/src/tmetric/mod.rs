//! t-metric Mahler measures over `Q` and imaginary quadratic fields of class number one.
//!
//! Every factorization can be replaced by one inside the field whose factors split the
//! prime ideals of `alpha` without cancellation, so the search runs over splits of the
//! valuation vector. The measure of a factor with ideal `J/J'` is
//! `(1/[K:Q]) log max(N(J), N(J'))`.

mod oracle;
mod rank1;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::classgrp::{class_number_one, ratio_generator};
use crate::error::{Error, Result};
use crate::ideals::{FractionalIdealRatio, PrimeIdeal, ValuationVector};
use crate::qfield::{ExactLog, Field, FieldElement, HeightValue};
use crate::realnum::{compare_with, CompareConfig, Comparison, LogExpr, START_PRECISION};

pub use oracle::{brute_force_oracle, brute_force_oracle_multi, ORACLE_MAX_OMEGA};
pub use rank1::tmetric_infty_rank1;

/// The exponent `t`: a positive rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TExponent {
    Finite(BigRational),
    Infinity,
}

impl TExponent {
    pub fn finite(num: i64, den: i64) -> Result<Self> {
        if den == 0 || num == 0 || (num < 0) != (den < 0) {
            return Err(Error::InvalidArgument(format!("t = {num}/{den} must be positive")));
        }
        Ok(TExponent::Finite(BigRational::new(num.into(), den.into())))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TExponent::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            TExponent::Finite(t) => t.to_f64().unwrap_or(f64::NAN),
            TExponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for TExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TExponent::Finite(t) => write!(f, "{t}"),
            TExponent::Infinity => f.write_str("inf"),
        }
    }
}

/// Accepts `inf`, an integer, `a/b`, or a decimal such as `0.5`.
impl FromStr for TExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("expected a positive number or inf, found {s:?}"),
        };
        if ["inf", "infinity", "∞"].iter().any(|w| s.eq_ignore_ascii_case(w)) {
            return Ok(TExponent::Infinity);
        }
        let t = if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        } else if let Some((i, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let whole: BigInt = if i.is_empty() { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
            let f: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10u32), frac.len());
            BigRational::from_integer(whole) + BigRational::new(f, scale)
        } else {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        };
        if !t.is_positive() {
            return Err(bad());
        }
        Ok(TExponent::Finite(t))
    }
}

/// A split of `alpha` into factors, one valuation vector per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationCandidate {
    pub parts: Vec<ValuationVector>,
    /// Powers of the fundamental unit attached to each part (rank 1 only).
    pub unit_exponents: Vec<i64>,
}

impl fmt::Display for FactorizationCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// How the optimum was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCertificate {
    pub nodes: u64,
    /// Candidates within the numeric slack of the optimum, resolved exactly or adaptively.
    pub near_optimal: usize,
    /// Every comparison in the final resolution was exact.
    pub exact: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMetricResult {
    pub field: Field,
    pub alpha: FieldElement,
    pub t: TExponent,
    pub value: HeightValue,
    pub attaining: FactorizationCandidate,
    /// Generators of the attaining parts; `unit_factor * prod factors = alpha`.
    pub factors: Vec<FieldElement>,
    pub unit_factor: FieldElement,
    /// Per-factor measures.
    pub measures: Vec<HeightValue>,
    /// Other splits, with different measures, whose value ties with the optimum.
    pub ties: Vec<FactorizationCandidate>,
    pub certificate: SearchCertificate,
}

/// One prime ideal occurrence.
#[derive(Clone, Debug)]
pub(crate) struct Item {
    pub prime: usize,
    pub numerator: bool,
    pub log_norm: f64,
}

/// Prime ideals of `alpha` and one item per unit of multiplicity, largest norm first.
pub(crate) fn items_of(alpha: &FieldElement) -> Result<(Vec<(PrimeIdeal, BigInt)>, Vec<Item>)> {
    let v = alpha.valuations()?;
    let mut primes = Vec::new();
    let mut items = Vec::new();
    for (p, e) in v.iter() {
        let norm = p.norm();
        let log_norm = norm.to_f64().unwrap_or(f64::INFINITY).ln();
        let idx = primes.len();
        primes.push((p.clone(), norm));
        for _ in 0..e.unsigned_abs() {
            items.push(Item {
                prime: idx,
                numerator: e > 0,
                log_norm,
            });
        }
    }
    items.sort_by(|a, b| {
        b.log_norm
            .total_cmp(&a.log_norm)
            .then(a.prime.cmp(&b.prime))
            .then(b.numerator.cmp(&a.numerator))
    });
    Ok((primes, items))
}

fn same_item(a: &Item, b: &Item) -> bool {
    a.prime == b.prime && a.numerator == b.numerator
}

/// Enumerates set partitions of `items` up to swapping equal items: an item equal to
/// its predecessor never goes to an earlier part. `visit` receives the part index of
/// every item and returns `false` to prune the subtree below a partial assignment.
pub(crate) fn for_each_split<F>(items: &[Item], max_parts: usize, mut visit: F) -> u64
where
    F: FnMut(&[usize], usize, bool) -> bool,
{
    fn go<F: FnMut(&[usize], usize, bool) -> bool>(
        items: &[Item],
        max_parts: usize,
        assign: &mut Vec<usize>,
        parts: usize,
        visit: &mut F,
        nodes: &mut u64,
    ) {
        *nodes += 1;
        let i = assign.len();
        if i == items.len() {
            visit(assign, parts, true);
            return;
        }
        let start = if i > 0 && same_item(&items[i], &items[i - 1]) {
            assign[i - 1]
        } else {
            0
        };
        let end = if parts < max_parts { parts + 1 } else { parts };
        for j in start..end {
            assign.push(j);
            let new_parts = parts.max(j + 1);
            if visit(assign, new_parts, false) {
                go(items, max_parts, assign, new_parts, visit, nodes);
            }
            assign.pop();
        }
    }
    let mut nodes = 0;
    go(items, max_parts, &mut Vec::with_capacity(items.len()), 0, &mut visit, &mut nodes);
    nodes
}

/// Factors of a split: `(numerator norm, denominator norm)` per part.
fn part_norms(primes: &[(PrimeIdeal, BigInt)], items: &[Item], assign: &[usize], parts: usize) -> Vec<(BigInt, BigInt)> {
    let mut out = vec![(BigInt::one(), BigInt::one()); parts];
    for (item, &j) in items.iter().zip(assign) {
        let n = &primes[item.prime].1;
        if item.numerator {
            out[j].0 *= n;
        } else {
            out[j].1 *= n;
        }
    }
    out
}

fn part_vectors(primes: &[(PrimeIdeal, BigInt)], items: &[Item], assign: &[usize], parts: usize) -> Vec<ValuationVector> {
    let mut out = vec![ValuationVector::new(); parts];
    for (item, &j) in items.iter().zip(assign) {
        out[j].add_to(primes[item.prime].0.clone(), if item.numerator { 1 } else { -1 });
    }
    out
}

/// Numeric cost: `sum m^t` for finite `t`, `max m` for infinite `t`.
fn cost_of(ms: impl Iterator<Item = f64>, t: &TExponent, tf: f64) -> f64 {
    match t {
        TExponent::Infinity => ms.fold(0.0, f64::max),
        TExponent::Finite(_) => ms.map(|m| m.powf(tf)).sum(),
    }
}

/// Exact value of a split given the sorted list of `max(N(J), N(J'))`.
fn split_value(key: &[BigInt], degree: u32, t: &TExponent) -> Result<HeightValue> {
    if key.is_empty() {
        return Ok(HeightValue::zero());
    }
    let exact = |m: BigInt| HeightValue::from_exact(ExactLog::new(degree, m), START_PRECISION);
    if key.len() == 1 {
        return Ok(exact(key[0].clone()));
    }
    match t {
        TExponent::Infinity => Ok(exact(key.iter().max().expect("nonempty").clone())),
        TExponent::Finite(tt) if tt.is_one() => Ok(exact(key.iter().product())),
        TExponent::Finite(tt) => {
            let inv_deg = BigRational::new(BigInt::one(), degree.into());
            let terms = key
                .iter()
                .map(|m| Ok(LogExpr::log_int(m.clone())?.scale(inv_deg.clone()).pow(tt.clone())))
                .collect::<Result<Vec<_>>>()?;
            HeightValue::from_expr(LogExpr::sum(terms).pow(tt.recip()), START_PRECISION)
        }
    }
}

/// Compares two split values; `exact` is cleared when an adaptive comparison was needed.
fn compare_keys(
    a: &[BigInt],
    b: &[BigInt],
    degree: u32,
    t: &TExponent,
    cfg: &CompareConfig,
    exact: &mut bool,
) -> Result<Comparison> {
    let ord = |o: Ordering| match o {
        Ordering::Less => Comparison::Less,
        Ordering::Equal => Comparison::Tie,
        Ordering::Greater => Comparison::Greater,
    };
    if a == b {
        return Ok(Comparison::Tie);
    }
    match t {
        TExponent::Infinity => return Ok(ord(a.iter().max().cmp(&b.iter().max()))),
        TExponent::Finite(tt) if tt.is_one() => {
            return Ok(ord(a.iter().product::<BigInt>().cmp(&b.iter().product::<BigInt>())))
        }
        _ => {}
    }
    *exact = false;
    let va = split_value(a, degree, t)?;
    let vb = split_value(b, degree, t)?;
    compare_with(va.expr(), vb.expr(), cfg)
}

fn check_field(field: Field) -> Result<()> {
    match field {
        Field::Rational => Ok(()),
        Field::Quadratic(k) if !k.is_real() => {
            if class_number_one(field)? {
                Ok(())
            } else {
                Err(Error::UnsupportedField(format!("{k} does not have class number one")))
            }
        }
        Field::Quadratic(k) => Err(Error::UnsupportedField(format!(
            "{k} is real; only t = inf is supported there"
        ))),
    }
}

/// Limit on the total prime multiplicity handled by the exact search.
pub const TMETRIC_MAX_OMEGA: usize = 40;

/// `m_{K,t}(alpha)` with an attaining factorization.
pub fn tmetric(field: Field, alpha: &FieldElement, t: &TExponent, cfg: &CompareConfig) -> Result<TMetricResult> {
    check_field(field)?;
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    let alpha = alpha.coerce(field)?;
    let degree = field.degree();
    let (primes, items) = items_of(&alpha)?;
    if items.len() > TMETRIC_MAX_OMEGA {
        return Err(Error::SearchLimit(format!(
            "{} prime factors exceed the limit of {TMETRIC_MAX_OMEGA}",
            items.len()
        )));
    }
    let tf = t.to_f64();
    let deg = f64::from(degree);
    let n = items.len();

    // Per part: log numerator and log denominator norms.
    let mut logs: Vec<(f64, f64)> = Vec::with_capacity(n);
    let part_cost = |logs: &[(f64, f64)]| cost_of(logs.iter().map(|&(a, b)| a.max(b) / deg), t, tf);
    // The single factor is always feasible.
    let single = {
        let (a, b) = items.iter().fold((0.0, 0.0), |(a, b), it| {
            if it.numerator {
                (a + it.log_norm, b)
            } else {
                (a, b + it.log_norm)
            }
        });
        cost_of(std::iter::once(f64::max(a, b) / deg), t, tf)
    };
    let mut best = single;
    let slack = |b: f64| 1e-9 * b.abs().max(1.0);
    let mut near: Vec<(f64, Vec<usize>, usize)> = Vec::new();
    // Largest single-item measure among items not yet placed, for the infinite case.
    let rest_max: Vec<f64> = (0..=n)
        .map(|i| items[i.min(n)..].iter().map(|it| it.log_norm / deg).fold(0.0, f64::max))
        .collect();

    let nodes = for_each_split(&items, n.max(1), |assign, parts, leaf| {
        let i = assign.len();
        logs.clear();
        logs.resize(parts, (0.0, 0.0));
        for (item, &j) in items.iter().zip(assign) {
            if item.numerator {
                logs[j].0 += item.log_norm;
            } else {
                logs[j].1 += item.log_norm;
            }
        }
        let c = part_cost(&logs);
        let bound = if t.is_infinite() { c.max(rest_max[i]) } else { c };
        if bound > best + slack(best) {
            return false;
        }
        if leaf {
            if c < best {
                best = c;
            }
            near.push((c, assign.to_vec(), parts));
        }
        true
    });
    let cut = best + slack(best);
    near.retain(|(c, _, _)| *c <= cut);

    // Distinct measure multisets among near-optimal splits, first representative kept.
    let mut by_key: BTreeMap<Vec<BigInt>, (Vec<usize>, usize)> = BTreeMap::new();
    for (_, assign, parts) in &near {
        let mut key: Vec<BigInt> = part_norms(&primes, &items, assign, *parts)
            .into_iter()
            .map(|(a, b)| a.max(b))
            .collect();
        key.sort();
        let entry = by_key.entry(key).or_insert_with(|| (assign.clone(), *parts));
        if *parts > entry.1 {
            *entry = (assign.clone(), *parts);
        }
    }
    if n == 0 {
        by_key.insert(Vec::new(), (Vec::new(), 0));
    }
    let mut exact = true;
    let keys: Vec<Vec<BigInt>> = by_key.keys().cloned().collect();
    let mut best_key = keys[0].clone();
    for k in &keys[1..] {
        let c = compare_keys(k, &best_key, degree, t, cfg, &mut exact)?;
        // On ties prefer the finer split.
        if c == Comparison::Less || (c == Comparison::Tie && k.len() > best_key.len()) {
            best_key = k.clone();
        }
    }
    let mut ties = Vec::new();
    for k in &keys {
        if *k != best_key && compare_keys(k, &best_key, degree, t, cfg, &mut exact)? == Comparison::Tie {
            let (assign, parts) = &by_key[k];
            ties.push(FactorizationCandidate {
                parts: part_vectors(&primes, &items, assign, *parts),
                unit_exponents: Vec::new(),
            });
        }
    }
    let (assign, parts) = &by_key[&best_key];
    let vectors = part_vectors(&primes, &items, assign, *parts);
    let norms = part_norms(&primes, &items, assign, *parts);
    let mut factors = Vec::with_capacity(vectors.len());
    let mut measures = Vec::with_capacity(vectors.len());
    for (v, (a, b)) in vectors.iter().zip(&norms) {
        factors.push(part_generator(field, v)?);
        measures.push(HeightValue::from_exact(ExactLog::new(degree, a.max(b).clone()), START_PRECISION));
    }
    let mut prod = FieldElement::one(field);
    for g in &factors {
        prod = prod.try_mul(g)?;
    }
    let unit_factor = alpha.try_div(&prod)?;
    if !unit_factor.is_unit() {
        return Err(Error::Inconsistent(format!("{unit_factor} is not a unit")));
    }
    Ok(TMetricResult {
        field,
        alpha: alpha.clone(),
        t: t.clone(),
        value: split_value(&best_key, degree, t)?,
        attaining: FactorizationCandidate {
            parts: vectors,
            unit_exponents: Vec::new(),
        },
        factors,
        unit_factor,
        measures,
        ties,
        certificate: SearchCertificate {
            nodes,
            near_optimal: by_key.len(),
            exact,
            note: "exhaustive over splits without cancellation".into(),
        },
    })
}

/// A generator of the ideal with valuation vector `v`.
pub(crate) fn part_generator(field: Field, v: &ValuationVector) -> Result<FieldElement> {
    let num = v.positive_part().to_ideal(field)?;
    let den = v.negative_part().to_ideal(field)?;
    ratio_generator(&FractionalIdealRatio::new(&num, &den)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::parse_element;

    fn run(field: Field, a: &str, t: &str) -> TMetricResult {
        let alpha = parse_element(field, a).unwrap();
        tmetric(field, &alpha, &t.parse().unwrap(), &CompareConfig::default()).unwrap()
    }

    #[test]
    fn parse_exponent() {
        assert_eq!("inf".parse::<TExponent>().unwrap(), TExponent::Infinity);
        assert_eq!("0.5".parse::<TExponent>().unwrap(), TExponent::finite(1, 2).unwrap());
        assert_eq!("3/2".parse::<TExponent>().unwrap(), TExponent::finite(3, 2).unwrap());
        assert!("0".parse::<TExponent>().is_err());
        assert!("-1".parse::<TExponent>().is_err());
        assert!("x".parse::<TExponent>().is_err());
    }

    #[test]
    fn rational_fixtures() {
        let r = run(Field::Rational, "12", "inf");
        assert_eq!(r.value.exact_form().unwrap().to_string(), "log(3)");
        let mut f: Vec<String> = r.factors.iter().map(|g| g.to_string()).collect();
        f.sort();
        assert_eq!(f, ["2", "2", "3"]);
        let r = run(Field::Rational, "2", "1");
        assert_eq!(r.value.exact_form().unwrap().to_string(), "log(2)");
        let r = run(Field::Rational, "4", "1");
        assert_eq!(r.value.exact_form().unwrap().to_string(), "log(4)");
        assert!(r.ties.len() == 1);
        let r = run(Field::Rational, "-1", "2");
        assert!(r.value.is_zero() && r.factors.is_empty());
        let r = run(Field::Rational, "6/5", "inf");
        assert_eq!(r.value.exact_form().unwrap().to_string(), "log(5)");
    }

    #[test]
    fn gaussian_five() {
        let k = Field::quadratic(-1).unwrap();
        let r = run(k, "5", "1");
        assert_eq!(r.value.exact_form().unwrap().to_string(), "log(5)");
        assert_eq!(r.factors.len(), 2);
        assert_eq!(r.ties.len(), 1);
        let r = run(k, "5*i", "inf");
        assert!((r.value.to_f64() - 0.5 * 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unsupported_fields() {
        let cfg = CompareConfig::default();
        let k = Field::quadratic(-5).unwrap();
        let x = parse_element(k, "2").unwrap();
        assert!(matches!(tmetric(k, &x, &TExponent::Infinity, &cfg), Err(Error::UnsupportedField(_))));
        let k = Field::quadratic(2).unwrap();
        let x = parse_element(k, "2").unwrap();
        assert!(tmetric(k, &x, &TExponent::Infinity, &cfg).is_err());
    }
}
