//! Randomized property suites, runnable from the command line.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{is_squarefree, primes_up_to};
use crate::classgrp::{class_number_one, is_principal};
use crate::error::{Error, Result};
use crate::ideals::{factor_ideal, prime_split, refine_factorization, IntegralIdeal, PrimeIdeal};
use crate::qfield::{abs_values, compare_heights, weil_height, Field, FieldElement};
use crate::realnum::{compare_with, CompareConfig, Comparison, Dyadic, RealInterval};
use crate::replace::{
    certify_power, certify_replacement, norm_descent, power_replacement, replacement, DescentDatum,
};
use crate::tmetric::{brute_force_oracle_multi, tmetric, TExponent};
use crate::units::{fundamental_unit, is_field_balanced, roots_of_unity};

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "census",
    "units",
    "balance",
    "refine",
    "replacement",
    "power-replacement",
    "tmetric-oracle",
    "metric-axioms",
    "heights",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Number of random instances; `None` uses each suite's default.
    pub cases: Option<u64>,
    /// Bound on `p*q` in the t-metric oracle suite.
    pub oracle_bound: u64,
    pub compare: CompareConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0x5eed,
            cases: None,
            oracle_bound: 10_000,
            compare: CompareConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub failure_count: u64,
    /// The first few failure messages.
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} cases, {} failures, {:.2}s",
            self.name,
            self.cases,
            self.failure_count,
            self.elapsed.as_secs_f64()
        )?;
        for m in &self.failures {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

struct Tally {
    cases: u64,
    failure_count: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure_count += 1;
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.cases += 1;
                self.fail(format!("{}: {e}", what()));
                None
            }
        }
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Tally::new();
    match name {
        "census" => census(&mut t),
        "units" => units(&mut t),
        "balance" => balance(&mut t),
        "refine" => refine(&mut t, &mut rng, cfg.cases.unwrap_or(1000)),
        "replacement" => replacement_suite(&mut t, &mut rng, cfg.cases.unwrap_or(1000), &cfg.compare),
        "power-replacement" => power_suite(&mut t, &mut rng, cfg.cases.unwrap_or(50), &cfg.compare),
        "tmetric-oracle" => oracle_suite(&mut t, cfg.oracle_bound, &cfg.compare),
        "metric-axioms" => axioms_suite(&mut t, &mut rng, cfg.cases.unwrap_or(200), &cfg.compare),
        "heights" => heights_suite(&mut t, &mut rng, cfg.cases.unwrap_or(1000), &cfg.compare),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    }
    Ok(SuiteReport {
        name: name.to_string(),
        cases: t.cases,
        failure_count: t.failure_count,
        failures: t.failures,
        elapsed: start.elapsed(),
    })
}

fn quad(d: i64) -> Field {
    Field::quadratic(d).expect("valid radicand")
}

fn census(t: &mut Tally) {
    let expected = [-1, -2, -3, -7, -11, -19, -43, -67, -163];
    for d in -200..=-1i64 {
        if !is_squarefree(d) {
            continue;
        }
        if let Some(one) = t.result(class_number_one(quad(d)), || format!("d = {d}")) {
            t.check(one == expected.contains(&d), || format!("d = {d}: class number one = {one}"));
        }
    }
}

/// Smallest `y > 0` with `x^2 - d y^2 = ±4`, giving `(x + y sqrt(d))/2`.
fn pell_unit(d: i64) -> Option<(BigInt, BigInt)> {
    let d = BigInt::from(d);
    let mut y = BigInt::one();
    while y < BigInt::from(2_000_000) {
        let dy2 = &d * &y * &y;
        for s in [-4, 4] {
            let x2: BigInt = &dy2 + s;
            if x2.is_positive() {
                let x = x2.sqrt();
                if &x * &x == x2 {
                    return Some((x, y));
                }
            }
        }
        y += 1;
    }
    None
}

fn units(t: &mut Tally) {
    for d in 2..=100i64 {
        if !is_squarefree(d) {
            continue;
        }
        let f = quad(d);
        let Some(e) = t.result(fundamental_unit(f), || format!("d = {d}")) else {
            continue;
        };
        let Some((x, y)) = pell_unit(d) else {
            continue;
        };
        let two = BigInt::from(2);
        let Some(expect) = t.result(
            FieldElement::from_sqrt_coords(
                f,
                &num_rational::BigRational::new(x, two.clone()),
                &num_rational::BigRational::new(y, two),
            ),
            || format!("d = {d}: Pell solution outside the order"),
        ) else {
            continue;
        };
        t.check(e == expect, || format!("d = {d}: {e} vs {expect}"));
    }
}

fn balance(t: &mut Tally) {
    if let Some(v) = t.result(is_field_balanced(quad(3)), || "d = 3".into()) {
        let norm_two = v.witness.as_ref().is_some_and(|w| *w.norm().abs().numer() == BigInt::from(2));
        t.check(!v.balanced && norm_two, || format!("d = 3: {v:?}"));
    }
    if let Some(v) = t.result(is_field_balanced(quad(2)), || "d = 2".into()) {
        t.check(v.balanced && !v.criterion_holds, || format!("d = 2: {v:?}"));
    }
    for d in [-1, -2, -3, -7, -11, -19, -43, -67, -163] {
        if let Some(v) = t.result(is_field_balanced(quad(d)), || format!("d = {d}")) {
            t.check(v.balanced, || format!("d = {d} reported unbalanced"));
        }
    }
}

fn random_prime_ideal(rng: &mut ChaCha8Rng, field: Field, primes: &[u64]) -> Result<PrimeIdeal> {
    let p = *primes.choose(rng).expect("nonempty");
    let above = prime_split(field, &BigInt::from(p))?;
    Ok(above.choose(rng).expect("at least one prime").clone())
}

fn random_ideal(rng: &mut ChaCha8Rng, field: Field, primes: &[u64], max_norm: u64, count: usize) -> Result<IntegralIdeal> {
    let mut acc = IntegralIdeal::unit(field);
    for _ in 0..count {
        let p = random_prime_ideal(rng, field, primes)?;
        let next = acc.mul(p.ideal())?;
        if next.norm() > BigInt::from(max_norm) {
            break;
        }
        acc = next;
    }
    Ok(acc)
}

/// Largest divisor of `rest` containing `j`, by enumerating divisors.
fn largest_divisor_containing(rest: &IntegralIdeal, j: &IntegralIdeal) -> Result<IntegralIdeal> {
    let v = factor_ideal(rest)?;
    let entries: Vec<(PrimeIdeal, i64)> = v.iter().map(|(p, e)| (p.clone(), e)).collect();
    let mut best = IntegralIdeal::unit(rest.field());
    let mut exps = vec![0i64; entries.len()];
    loop {
        let mut d = IntegralIdeal::unit(rest.field());
        for ((p, _), &e) in entries.iter().zip(&exps) {
            d = d.mul(&p.ideal().pow(e as u32)?)?;
        }
        if d.contains(j) && d.norm() > best.norm() {
            best = d;
        }
        let mut k = 0;
        while k < exps.len() {
            exps[k] += 1;
            if exps[k] <= entries[k].1 {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
        if k == exps.len() {
            break;
        }
    }
    Ok(best)
}

fn refine(t: &mut Tally, rng: &mut ChaCha8Rng, cases: u64) {
    let fields = [Field::Rational, quad(-1), quad(-5)];
    let primes: Vec<u64> = primes_up_to(60).collect();
    for case in 0..cases {
        let field = fields[(case % 3) as usize];
        let r: Result<()> = (|| {
            let count = rng.gen_range(0..6);
            let i = random_ideal(rng, field, &primes, 10_000, count)?;
            let n = rng.gen_range(1..=4);
            // J_n: the prime factors of I dealt out, plus extra primes
            let mut js = vec![IntegralIdeal::unit(field); n];
            for (p, e) in factor_ideal(&i)?.iter() {
                for _ in 0..e {
                    let k = rng.gen_range(0..n);
                    js[k] = js[k].mul(p.ideal())?;
                }
            }
            for j in js.iter_mut() {
                if rng.gen_bool(0.5) {
                    let extra = random_prime_ideal(rng, field, &primes)?;
                    if j.norm() * extra.norm() <= BigInt::from(10_000) {
                        *j = j.mul(extra.ideal())?;
                    }
                }
            }
            let out = refine_factorization(&i, &js)?;
            let mut prod = IntegralIdeal::unit(field);
            for x in &out {
                prod = prod.mul(x)?;
            }
            t.check(prod == i, || format!("{field}: product of parts of {i} is {prod}"));
            for (x, j) in out.iter().zip(&js) {
                t.check(x.contains(j), || format!("{field}: {j} not inside {x}"));
            }
            if factor_ideal(&i)?.total_multiplicity() <= 4 {
                let mut rest = i.clone();
                for (x, j) in out.iter().zip(&js) {
                    let d = largest_divisor_containing(&rest, j)?;
                    t.check(d == *x, || format!("{field}: divisor enumeration gives {d}, refine gives {x}"));
                    rest = rest.quotient(x)?;
                }
            }
            Ok(())
        })();
        t.result(r, || format!("refine case {case} over {field}"));
    }
}

fn random_element(rng: &mut ChaCha8Rng, field: Field, coeff: i64, den: i64) -> FieldElement {
    loop {
        let p = rng.gen_range(-coeff..=coeff);
        let q = if field.is_rational() { 0 } else { rng.gen_range(-coeff..=coeff) };
        let d = rng.gen_range(1..=den);
        let x = FieldElement::new(field, p.into(), q.into(), d.into()).expect("positive denominator");
        if !x.is_zero() {
            return x;
        }
    }
}

/// A random factorization `alpha = x_1 ... x_N` inside `field`, with a cancelling pair.
fn random_factorization(rng: &mut ChaCha8Rng, field: Field) -> (FieldElement, Vec<FieldElement>) {
    let n = rng.gen_range(1..=4);
    let mut xs: Vec<FieldElement> = (0..n).map(|_| random_element(rng, field, 9, 4)).collect();
    if n >= 2 && rng.gen_bool(0.7) {
        let pi = random_element(rng, field, 5, 1);
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            xs[a] = &xs[a] * &pi;
            xs[b] = xs[b].try_div(&pi).expect("nonzero");
        }
    }
    let alpha = xs.iter().fold(FieldElement::one(field), |acc, x| &acc * x);
    (alpha, xs)
}

fn replacement_suite(t: &mut Tally, rng: &mut ChaCha8Rng, cases: u64, cfg: &CompareConfig) {
    let fields = [Field::Rational, quad(-1), quad(-3)];
    for case in 0..cases {
        let field = fields[(case % 3) as usize];
        let r: Result<()> = (|| {
            let (alpha, data) = if field.is_rational() && case % 2 == 1 {
                // factors in an imaginary quadratic field whose product is rational
                let e = if rng.gen_bool(0.5) { quad(-1) } else { quad(-3) };
                let rq = random_element(rng, Field::Rational, 30, 6);
                let r = rq.coerce(e)?;
                let (_, mut xs) = random_factorization(rng, e);
                let rest = xs.iter().skip(1).fold(FieldElement::one(e), |acc, x| &acc * x);
                xs[0] = r.try_div(&rest)?;
                let data = xs.iter().map(norm_descent).collect::<Result<Vec<_>>>()?;
                (rq, data)
            } else {
                let (a, xs) = random_factorization(rng, field);
                let data = xs.iter().map(DescentDatum::in_field).collect::<Result<Vec<_>>>()?;
                (a, data)
            };
            let out = replacement(field, &alpha, &data, cfg)?;
            let rep = certify_replacement(&out, &alpha, &data, cfg);
            t.check(rep.all_ok(), || format!("{field}: alpha = {alpha}: {}", rep.failures.join("; ")));
            t.check(rep.heights.iter().all(|h| h.exact), || format!("{field}: inexact height check"));
            Ok(())
        })();
        t.result(r, || format!("replacement case {case} over {field}"));
    }
}

fn power_suite(t: &mut Tally, rng: &mut ChaCha8Rng, cases: u64, cfg: &CompareConfig) {
    let k = quad(-5);
    let r: Result<()> = (|| {
        let p = IntegralIdeal::from_generators(
            k,
            &[FieldElement::from_int(k, 2), FieldElement::new(k, 1.into(), 1.into(), 1.into())?],
        )?;
        t.check(is_principal(&p)?.is_none(), || "P is principal".into());
        let p2 = p.pow(2)?;
        t.check(p2 == IntegralIdeal::from_int(k, 2)?, || format!("P^2 = {p2}"));
        t.check(is_principal(&p2)?.is_some(), || "P^2 not principal".into());
        let alpha = FieldElement::from_int(k, 2);
        let b1 = FieldElement::new(k, 1.into(), 1.into(), 1.into())?;
        let data = vec![DescentDatum::in_field(&b1)?, DescentDatum::in_field(&alpha.try_div(&b1)?)?];
        let out = power_replacement(k, 2, &alpha, &data, cfg)?;
        let rep = certify_power(&out, &alpha, &data, cfg);
        t.check(rep.all_ok(), || format!("P instance: {}", rep.failures.join("; ")));
        Ok(())
    })();
    t.result(r, || "power replacement P instance".into());
    for case in 0..cases {
        let r: Result<()> = (|| {
            let (alpha, xs) = random_factorization(rng, k);
            let data = xs.iter().map(DescentDatum::in_field).collect::<Result<Vec<_>>>()?;
            let out = power_replacement(k, 2, &alpha, &data, cfg)?;
            let rep = certify_power(&out, &alpha, &data, cfg);
            t.check(rep.all_ok(), || format!("alpha = {alpha}: {}", rep.failures.join("; ")));
            Ok(())
        })();
        t.result(r, || format!("power replacement case {case}"));
    }
}

/// All `p/q` in lowest terms with `p*q <= bound`.
pub fn rationals_up_to(bound: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in 1..=bound {
        for q in 1..=bound / p {
            if p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

/// The four exponents of the oracle comparison.
pub fn oracle_exponents() -> Vec<TExponent> {
    vec![
        TExponent::finite(1, 2).expect("positive"),
        TExponent::finite(1, 1).expect("positive"),
        TExponent::finite(2, 1).expect("positive"),
        TExponent::Infinity,
    ]
}

/// `tmetric` against the oracle for one rational; returns failure messages.
pub fn oracle_check(p: u64, q: u64, cfg: &CompareConfig) -> Result<Vec<String>> {
    let f = Field::Rational;
    let alpha = FieldElement::from_rational(f, &num_rational::BigRational::new(p.into(), q.into()));
    let ts = oracle_exponents();
    let omega = alpha.valuations()?.total_multiplicity() as usize;
    let oracle = brute_force_oracle_multi(f, &alpha, &ts, omega.max(1))?;
    let mut out = Vec::new();
    for (t, o) in ts.iter().zip(oracle) {
        let v = tmetric(f, &alpha, t, cfg)?.value.to_f64();
        if (v - o).abs() > cfg.tie_tolerance.max(1e-12) {
            out.push(format!("{p}/{q}, t = {t}: tmetric {v} vs oracle {o}"));
        }
    }
    Ok(out)
}

fn oracle_suite(t: &mut Tally, bound: u64, cfg: &CompareConfig) {
    for (p, q) in rationals_up_to(bound) {
        if let Some(msgs) = t.result(oracle_check(p, q, cfg), || format!("{p}/{q}")) {
            t.cases += 1;
            for m in msgs {
                t.fail(m);
            }
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> FieldElement {
    let p: i64 = rng.gen_range(1..=300);
    let q: i64 = rng.gen_range(1..=300);
    FieldElement::from_rational(Field::Rational, &num_rational::BigRational::new(p.into(), q.into()))
}

fn axioms_suite(t: &mut Tally, rng: &mut ChaCha8Rng, cases: u64, cfg: &CompareConfig) {
    let f = Field::Rational;
    let tol = 1e-9;
    for case in 0..cases {
        let (a, b) = (random_rational(rng), random_rational(rng));
        let ab = &a * &b;
        for tt in [1, 2] {
            let texp = TExponent::finite(tt, 1).expect("positive");
            let r: Result<()> = (|| {
                let ma = tmetric(f, &a, &texp, cfg)?.value.to_f64();
                let mb = tmetric(f, &b, &texp, cfg)?.value.to_f64();
                let mab = tmetric(f, &ab, &texp, cfg)?.value.to_f64();
                let e = tt as i32;
                t.check(mab.powi(e) <= ma.powi(e) + mb.powi(e) + tol, || {
                    format!("t = {tt}: m({ab})^t = {} > {} + {}", mab.powi(e), ma.powi(e), mb.powi(e))
                });
                Ok(())
            })();
            t.result(r, || format!("axiom case {case}"));
        }
    }
    let fixtures = [
        "2", "6", "12", "30", "7/3", "360", "1001", "64", "210/11", "97", "5/6", "1024/3",
        "2310", "9/8", "100", "3/1000", "720", "49/50", "13*17", "4096/81",
    ];
    for s in fixtures {
        let r: Result<()> = (|| {
            let a = crate::qfield::parse_element(f, s)?;
            let inf = tmetric(f, &a, &TExponent::Infinity, cfg)?.value.to_f64();
            let mut prev = f64::INFINITY;
            for tt in [4, 8, 16, 32] {
                let v = tmetric(f, &a, &TExponent::finite(tt, 1)?, cfg)?.value.to_f64();
                t.check(v <= prev + tol && v >= inf - tol, || {
                    format!("{s}: m_{tt} = {v}, previous {prev}, m_inf = {inf}")
                });
                prev = v;
            }
            Ok(())
        })();
        t.result(r, || format!("limit fixture {s}"));
    }
}

fn product_contains_one(vals: &[(crate::qfield::Place, RealInterval)]) -> bool {
    let Some(first) = vals.first() else {
        return false;
    };
    let bits = first.1.precision_bits();
    let prod = vals
        .iter()
        .fold(RealInterval::from_int(1, bits), |acc, (_, v)| acc.mul(v));
    prod.contains(&Dyadic::one())
}

fn heights_suite(t: &mut Tally, rng: &mut ChaCha8Rng, cases: u64, cfg: &CompareConfig) {
    for d in [-1, -3, 2, 3, 5] {
        let field = quad(d);
        let zetas = roots_of_unity(field);
        for case in 0..cases {
            let x = random_element(rng, field, 30, 8);
            let y = random_element(rng, field, 30, 8);
            let r: Result<()> = (|| {
                t.check(product_contains_one(&abs_values(&x)?), || format!("{field}: product formula at {x}"));
                let hx = weil_height(&x)?;
                for n in -3i64..=3 {
                    let hn = weil_height(&x.pow(n)?)?;
                    let c = if n == 0 {
                        if hn.is_zero() { Comparison::Tie } else { Comparison::Greater }
                    } else {
                        compare_heights(&hn, &hx.scale(n.unsigned_abs() as u32), cfg)?
                    };
                    t.check(c == Comparison::Tie, || format!("{field}: h({x}^{n}) != {n}|h|"));
                }
                let hy = weil_height(&y)?;
                let hxy = weil_height(&(&x * &y))?;
                let sum = hx.expr().clone() + hy.expr().clone();
                let c = compare_with(hxy.expr(), &sum, cfg)?;
                t.check(c.is_le(), || format!("{field}: h({x} * {y}) > h + h"));
                let c = compare_heights(&weil_height(&x.conjugate())?, &hx, cfg)?;
                t.check(c == Comparison::Tie, || format!("{field}: conjugate changes h({x})"));
                for z in &zetas {
                    let c = compare_heights(&weil_height(&(z * &x))?, &hx, cfg)?;
                    t.check(c == Comparison::Tie, || format!("{field}: h({z} * {x}) != h({x})"));
                }
                Ok(())
            })();
            t.result(r, || format!("heights case {case} over {field}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let cfg = VerifyConfig {
            cases: Some(20),
            oracle_bound: 60,
            ..VerifyConfig::default()
        };
        for name in ["balance", "refine", "replacement", "power-replacement", "tmetric-oracle", "heights"] {
            let r = run_suite(name, &cfg).unwrap();
            assert!(r.passed(), "{r}");
        }
        assert!(run_suite("nope", &cfg).is_err());
    }
}
