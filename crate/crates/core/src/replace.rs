//! Height-reducing replacement of a factorization `alpha = alpha_1 ... alpha_N`.
//!
//! The input factors are given through their norms to the base field (`DescentDatum`),
//! so that `alpha^g = prod beta_n^(e_n)`. The output is `alpha = gamma_0 gamma_1 ... gamma_N`
//! with `gamma_0` a unit and `h(gamma_n) <= m(alpha_n)`.

use std::fmt;

use crate::classgrp::{class_info, is_principal, minimize_over_units_exp};
use crate::error::{Error, Result};
use crate::ideals::{coprime_split, refine_factorization, IntegralIdeal, ValuationVector};
use crate::qfield::{compare_heights, mahler_measure_over, weil_height, Field, FieldElement, HeightValue};
use crate::realnum::{CompareConfig, Comparison};
use crate::units::{balancing_window, fundamental_unit, is_field_balanced};

/// One factor seen from the base field: `beta = Norm(alpha_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentDatum {
    pub beta: FieldElement,
    /// `[E : K(alpha_n)]` for the common field `E`.
    pub rel_degree_exp: u32,
    /// `[K(alpha_n) : K]`.
    pub degree: u32,
    /// `m_K(alpha_n)`.
    pub source_measure: HeightValue,
}

impl DescentDatum {
    /// Checks `source_measure >= h(beta)`.
    pub fn new(
        beta: FieldElement,
        rel_degree_exp: u32,
        degree: u32,
        source_measure: HeightValue,
        cfg: &CompareConfig,
    ) -> Result<Self> {
        if beta.is_zero() {
            return Err(Error::ZeroInput);
        }
        if rel_degree_exp == 0 || degree == 0 {
            return Err(Error::InvalidArgument("degrees must be positive".into()));
        }
        if compare_heights(&weil_height(&beta)?, &source_measure, cfg)? == Comparison::Greater {
            return Err(Error::Inconsistent(format!(
                "measure {source_measure} is below the height of {beta}"
            )));
        }
        Ok(DescentDatum {
            beta,
            rel_degree_exp,
            degree,
            source_measure,
        })
    }

    /// A factor lying in the base field itself.
    pub fn in_field(alpha_n: &FieldElement) -> Result<Self> {
        if alpha_n.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(DescentDatum {
            beta: alpha_n.clone(),
            rel_degree_exp: 1,
            degree: 1,
            source_measure: weil_height(alpha_n)?,
        })
    }

    /// `[E : K]`.
    pub fn total_degree(&self) -> u32 {
        self.rel_degree_exp * self.degree
    }
}

/// Norm of `alpha_n` down to `Q`, with `E` the field `alpha_n` is written in.
///
/// A rational `alpha_n` written in a quadratic field keeps `beta = alpha_n` and gets `e = 2`.
pub fn norm_descent(alpha_n: &FieldElement) -> Result<DescentDatum> {
    if alpha_n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let measure = mahler_measure_over(Field::Rational, alpha_n)?;
    let field_degree = alpha_n.field().degree();
    let (beta, degree) = if alpha_n.is_rational() {
        (alpha_n.as_rational().expect("rational"), 1)
    } else {
        (alpha_n.norm(), 2)
    };
    Ok(DescentDatum {
        beta: FieldElement::from_rational(Field::Rational, &beta),
        rel_degree_exp: field_degree / degree,
        degree,
        source_measure: measure,
    })
}

/// Outcome of one height comparison `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightCheck {
    pub index: usize,
    pub lhs: HeightValue,
    pub rhs: HeightValue,
    pub comparison: Comparison,
    pub exact: bool,
}

impl HeightCheck {
    pub fn holds(&self) -> bool {
        self.comparison.is_le()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplacementResult {
    pub field: Field,
    pub gamma0: FieldElement,
    pub gammas: Vec<FieldElement>,
    /// Numerator and denominator ideals of each `gamma_n`.
    pub numerators: Vec<IntegralIdeal>,
    pub denominators: Vec<IntegralIdeal>,
    /// Power of the fundamental unit folded into each `gamma_n` (rank 1 only).
    pub unit_exponents: Vec<i64>,
    pub certificates: Vec<HeightCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerReplacementResult {
    pub field: Field,
    pub lambda: u32,
    /// The values `gamma_n^lambda`.
    pub gamma_lambda_values: Vec<FieldElement>,
    pub gamma0_lambda: FieldElement,
    /// `I_n` and `I'_n`; their `lambda`-th powers are generated by the values above.
    pub numerators: Vec<IntegralIdeal>,
    pub denominators: Vec<IntegralIdeal>,
    pub unit_exponents: Vec<i64>,
    /// `h(gamma_n^lambda) <= lambda * m(alpha_n)`.
    pub certificates: Vec<HeightCheck>,
}

/// The common exponent `g = [E:K]`, and the identity `g v(alpha) = sum e_n v(beta_n)`.
fn check_identity(alpha: &FieldElement, data: &[DescentDatum]) -> Result<u32> {
    let g = data[0].total_degree();
    if let Some(d) = data.iter().find(|d| d.total_degree() != g) {
        return Err(Error::Inconsistent(format!(
            "factor {} gives [E:K] = {} but the first gives {g}",
            d.beta,
            d.total_degree()
        )));
    }
    let lhs = alpha.valuations()?.scaled(i64::from(g));
    let mut rhs = ValuationVector::new();
    for d in data {
        rhs = rhs.plus(&d.beta.valuations()?.scaled(i64::from(d.rel_degree_exp)));
    }
    if lhs != rhs {
        return Err(Error::Inconsistent(format!(
            "ideal identity fails: {g} * v(alpha) = {lhs} but the factors give {rhs}"
        )));
    }
    Ok(g)
}

fn generator(ideal: &IntegralIdeal) -> Result<FieldElement> {
    is_principal(ideal)?.ok_or_else(|| Error::NotPrincipal(ideal.to_string()))
}

/// Shared construction; `lambda = 1` is the class-number-one case.
fn construct(
    field: Field,
    lambda: u32,
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> Result<PowerReplacementResult> {
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    if data.is_empty() {
        return Err(Error::InvalidArgument("no factors given".into()));
    }
    if lambda == 0 {
        return Err(Error::InvalidArgument("lambda must be positive".into()));
    }
    let alpha = alpha.coerce(field)?;
    let data: Vec<DescentDatum> = data
        .iter()
        .map(|d| {
            Ok(DescentDatum {
                beta: d.beta.coerce(field)?,
                ..d.clone()
            })
        })
        .collect::<Result<_>>()?;
    let verdict = is_field_balanced(field)?;
    if !verdict.balanced {
        let w = verdict.witness.map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::Unbalanced(format!("{field} (witness {w})")));
    }
    check_identity(&alpha, &data)?;

    let a = coprime_split(&alpha)?;
    let splits = data
        .iter()
        .map(|d| coprime_split(&d.beta))
        .collect::<Result<Vec<_>>>()?;
    let js: Vec<IntegralIdeal> = splits.iter().map(|s| s.numerator().clone()).collect();
    let jps: Vec<IntegralIdeal> = splits.iter().map(|s| s.denominator().clone()).collect();
    let nums = refine_factorization(a.numerator(), &js)?;
    let dens = refine_factorization(a.denominator(), &jps)?;

    let unit = if field.is_real_quadratic() {
        Some(fundamental_unit(field)?)
    } else {
        None
    };
    let mut values = Vec::with_capacity(data.len());
    let mut exps = Vec::with_capacity(data.len());
    let mut certs = Vec::with_capacity(data.len());
    for (n, d) in data.iter().enumerate() {
        let c = generator(&nums[n].pow(lambda)?)?;
        let cp = generator(&dens[n].pow(lambda)?)?;
        let base = c.try_div(&cp)?;
        let (value, k) = match &unit {
            None => (base, 0),
            Some(e) => {
                // r = y d / c and r' = d' / c' are integral; both need a balancing unit
                let dp = generator(&jps[n].pow(lambda)?)?;
                let r = d.beta.pow(i64::from(lambda))?.try_mul(&dp)?.try_div(&c)?;
                let rp = dp.try_div(&cp)?;
                let w = balancing_window(&r, e)?;
                let wp = balancing_window(&rp, e)?;
                if w.is_empty() || wp.is_empty() {
                    return Err(Error::Unbalanced(format!("no balancing unit for factor {n}")));
                }
                // Any l in w, l' in wp gives a valid gamma = (c / e^l) / (c' / e^l'); the
                // least-height unit multiple of c / c' is no higher than any of them.
                minimize_over_units_exp(&base, cfg)?
            }
        };
        let lhs = weil_height(&value)?;
        let rhs = d.source_measure.scale(lambda);
        let comparison = compare_heights(&lhs, &rhs, cfg)?;
        if !comparison.is_le() {
            return Err(Error::Inconsistent(format!(
                "factor {n}: h = {lhs} exceeds the bound {rhs}"
            )));
        }
        certs.push(HeightCheck {
            index: n,
            exact: lhs.exact_form().is_some() && rhs.exact_form().is_some(),
            lhs,
            rhs,
            comparison,
        });
        values.push(value);
        exps.push(k);
    }
    let mut prod = FieldElement::one(field);
    for v in &values {
        prod = prod.try_mul(v)?;
    }
    let gamma0 = alpha.pow(i64::from(lambda))?.try_div(&prod)?;
    if !gamma0.is_unit() {
        return Err(Error::Inconsistent(format!("gamma_0 = {gamma0} is not a unit")));
    }
    Ok(PowerReplacementResult {
        field,
        lambda,
        gamma_lambda_values: values,
        gamma0_lambda: gamma0,
        numerators: nums,
        denominators: dens,
        unit_exponents: exps,
        certificates: certs,
    })
}

/// The class-number-one construction.
pub fn replacement(
    field: Field,
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> Result<ReplacementResult> {
    let class = class_info(field)?;
    if !class.class_number_one {
        let witness = class.nonprincipal_witness.map_or_else(|| field.to_string(), |i| i.generator_form());
        return Err(Error::NotPrincipal(witness));
    }
    let r = construct(field, 1, alpha, data, cfg)?;
    Ok(ReplacementResult {
        field,
        gamma0: r.gamma0_lambda,
        gammas: r.gamma_lambda_values,
        numerators: r.numerators,
        denominators: r.denominators,
        unit_exponents: r.unit_exponents,
        certificates: r.certificates,
    })
}

/// The `lambda`-th power construction; `lambda` should be the class number.
pub fn power_replacement(
    field: Field,
    lambda: u32,
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> Result<PowerReplacementResult> {
    construct(field, lambda, alpha, data, cfg)
}

/// Independent re-verification of a replacement output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub product_ok: bool,
    pub unit_ok: bool,
    /// Numerators of the outputs multiply to the numerator of `alpha^lambda`, likewise denominators.
    pub no_cancellation_ok: bool,
    pub heights: Vec<HeightCheck>,
    pub failures: Vec<String>,
}

impl CertificateReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "product: {}", ok(self.product_ok))?;
        writeln!(f, "unit: {}", ok(self.unit_ok))?;
        writeln!(f, "no cancellation: {}", ok(self.no_cancellation_ok))?;
        for h in &self.heights {
            writeln!(f, "height[{}]: {} vs {} -> {}", h.index, h.lhs, h.rhs, ok(h.holds()))?;
        }
        Ok(())
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

pub fn certify_replacement(
    result: &ReplacementResult,
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> CertificateReport {
    certify_values(1, &result.gamma0, &result.gammas, alpha, data, cfg)
}

pub fn certify_power(
    result: &PowerReplacementResult,
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> CertificateReport {
    let mut report = certify_values(
        result.lambda,
        &result.gamma0_lambda,
        &result.gamma_lambda_values,
        alpha,
        data,
        cfg,
    );
    for (n, (i, ip)) in result.numerators.iter().zip(&result.denominators).enumerate() {
        let g = result.gamma_lambda_values.get(n);
        let gens_ok = g.is_some_and(|g| {
            let (Ok(s), Ok(a), Ok(b)) = (coprime_split(g), i.pow(result.lambda), ip.pow(result.lambda))
            else {
                return false;
            };
            *s.numerator() == a && *s.denominator() == b
        });
        if !gens_ok {
            report
                .failures
                .push(format!("value {n} does not generate I^lambda / I'^lambda"));
        }
    }
    report
}

fn certify_values(
    lambda: u32,
    gamma0: &FieldElement,
    gammas: &[FieldElement],
    alpha: &FieldElement,
    data: &[DescentDatum],
    cfg: &CompareConfig,
) -> CertificateReport {
    let mut failures = Vec::new();
    let field = gamma0.field();
    let target = alpha
        .coerce(field)
        .and_then(|a| a.pow(i64::from(lambda)));
    let product = gammas
        .iter()
        .try_fold(gamma0.clone(), |acc, g| acc.try_mul(g));
    let product_ok = matches!((&target, &product), (Ok(t), Ok(p)) if t == p);
    if !product_ok {
        failures.push("product identity fails".to_string());
    }
    let unit_ok = gamma0.is_unit();
    if !unit_ok {
        failures.push(format!("{gamma0} is not a unit"));
    }
    let no_cancellation_ok = target
        .and_then(|t| {
            let a = coprime_split(&t)?;
            let mut num = IntegralIdeal::unit(field);
            let mut den = IntegralIdeal::unit(field);
            for g in gammas {
                let s = coprime_split(g)?;
                num = num.mul(s.numerator())?;
                den = den.mul(s.denominator())?;
            }
            Ok(num == *a.numerator() && den == *a.denominator())
        })
        .unwrap_or(false);
    if !no_cancellation_ok {
        failures.push("numerators or denominators cancel".to_string());
    }
    let mut heights = Vec::new();
    if gammas.len() != data.len() {
        failures.push(format!("{} outputs for {} factors", gammas.len(), data.len()));
    }
    for (n, (g, d)) in gammas.iter().zip(data).enumerate() {
        let lhs = match weil_height(g) {
            Ok(h) => h,
            Err(e) => {
                failures.push(format!("height of output {n}: {e}"));
                continue;
            }
        };
        let rhs = d.source_measure.scale(lambda);
        let comparison = match compare_heights(&lhs, &rhs, cfg) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("height comparison {n}: {e}"));
                continue;
            }
        };
        let check = HeightCheck {
            index: n,
            exact: lhs.exact_form().is_some() && rhs.exact_form().is_some(),
            lhs,
            rhs,
            comparison,
        };
        if !check.holds() {
            failures.push(format!("height bound fails at {n}"));
        }
        heights.push(check);
    }
    CertificateReport {
        product_ok,
        unit_ok,
        no_cancellation_ok,
        heights,
        failures,
    }
}

/// `true` when `x` and `y` differ by a unit.
pub fn equal_up_to_unit(x: &FieldElement, y: &FieldElement) -> bool {
    match x.try_div(y) {
        Ok(q) => q.is_unit(),
        Err(_) => false,
    }
}

/// Sum of `h(beta_n)`, for the aggregate bound check.
pub fn total_beta_height(data: &[DescentDatum]) -> Result<f64> {
    data.iter()
        .map(|d| weil_height(&d.beta).map(|h| h.to_f64()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use crate::qfield::parse_element;

    fn el(f: Field, s: &str) -> FieldElement {
        parse_element(f, s).unwrap()
    }

    fn cfg() -> CompareConfig {
        CompareConfig::default()
    }

    #[test]
    fn descent_examples() {
        let k = Field::quadratic(-1).unwrap();
        let d = norm_descent(&el(k, "3")).unwrap();
        assert_eq!((d.beta.to_string().as_str(), d.rel_degree_exp), ("3", 2));
        let d = norm_descent(&el(k, "1+i")).unwrap();
        assert_eq!((d.beta.to_string().as_str(), d.rel_degree_exp), ("2", 1));
        assert_eq!(d.source_measure.exact_form().unwrap().to_string(), "log(2)");
        let k = Field::quadratic(5).unwrap();
        let d = norm_descent(&el(k, "(1+sqrt(5))/2")).unwrap();
        assert_eq!(d.beta.to_string(), "-1");
        assert!((d.source_measure.to_f64() - 0.481_211_825_059_603_4).abs() < 1e-12);
    }

    #[test]
    fn rational_example() {
        let q = Field::Rational;
        let data = vec![
            DescentDatum::in_field(&el(q, "6")).unwrap(),
            DescentDatum::in_field(&el(q, "1/3")).unwrap(),
        ];
        let alpha = el(q, "2");
        let r = replacement(q, &alpha, &data, &cfg()).unwrap();
        assert!(r.gamma0.is_unit());
        let g: Vec<String> = r.gammas.iter().map(|g| g.to_string()).collect();
        assert_eq!(g, ["2", "1"]);
        let rep = certify_replacement(&r, &alpha, &data, &cfg());
        assert!(rep.all_ok(), "{rep}");
        assert!(rep.heights.iter().all(|h| h.exact));

        let mut bad = r.clone();
        bad.gammas[0] = &bad.gammas[0] * &el(q, "2");
        let rep = certify_replacement(&bad, &alpha, &data, &cfg());
        assert!(!rep.product_ok);
    }

    #[test]
    fn gaussian_example() {
        let k = Field::quadratic(-1).unwrap();
        let alpha = el(k, "5");
        let data = vec![
            DescentDatum::in_field(&el(k, "1+3*i")).unwrap(),
            DescentDatum::in_field(&el(k, "(1-3*i)/2")).unwrap(),
        ];
        let r = replacement(k, &alpha, &data, &cfg()).unwrap();
        let rep = certify_replacement(&r, &alpha, &data, &cfg());
        assert!(rep.all_ok(), "{rep}");
        for g in &r.gammas {
            assert_eq!(g.norm(), BigRational::from_integer(5.into()));
        }
    }

    #[test]
    fn single_factor_and_real_field() {
        let k = Field::quadratic(2).unwrap();
        let alpha = el(k, "sqrt(2)*(1+sqrt(2))^5");
        let data = vec![DescentDatum::in_field(&alpha).unwrap()];
        let r = replacement(k, &alpha, &data, &cfg()).unwrap();
        assert_eq!(r.gammas[0].to_string(), "sqrt(2)");
        assert!(certify_replacement(&r, &alpha, &data, &cfg()).all_ok());

        let alpha = el(k, "7");
        let data = vec![
            DescentDatum::in_field(&el(k, "3+sqrt(2)")).unwrap(),
            DescentDatum::in_field(&el(k, "(3-sqrt(2))*(1+sqrt(2))^4")).unwrap(),
        ];
        let r = replacement(k, &alpha, &data, &cfg()).unwrap();
        let rep = certify_replacement(&r, &alpha, &data, &cfg());
        assert!(rep.all_ok(), "{rep}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = Field::quadratic(3).unwrap();
        let alpha = el(k, "2");
        let data = vec![DescentDatum::in_field(&alpha).unwrap()];
        assert!(matches!(replacement(k, &alpha, &data, &cfg()), Err(Error::Unbalanced(_))));
        let k = Field::quadratic(-1).unwrap();
        let data = vec![DescentDatum::in_field(&el(k, "3")).unwrap()];
        assert!(matches!(
            replacement(k, &el(k, "5"), &data, &cfg()),
            Err(Error::Inconsistent(_))
        ));
        let k = Field::quadratic(-5).unwrap();
        let data = vec![DescentDatum::in_field(&el(k, "2")).unwrap()];
        assert!(matches!(replacement(k, &el(k, "2"), &data, &cfg()), Err(Error::NotPrincipal(_))));
    }

    #[test]
    fn power_replacement_sqrt_minus5() {
        let k = Field::quadratic(-5).unwrap();
        let alpha = el(k, "2");
        let data = vec![
            DescentDatum::in_field(&el(k, "1+sqrt(-5)")).unwrap(),
            DescentDatum::in_field(&el(k, "2/(1+sqrt(-5))")).unwrap(),
        ];
        let r = power_replacement(k, 2, &alpha, &data, &cfg()).unwrap();
        let rep = certify_power(&r, &alpha, &data, &cfg());
        assert!(rep.all_ok(), "{rep}");
        let p = crate::ideals::parse_ideal(k, "(2, 1+sqrt(-5))").unwrap();
        assert_eq!(r.numerators, vec![p.clone(), p.clone()]);
        assert_eq!(p.pow(2).unwrap(), IntegralIdeal::from_int(k, 2).unwrap());
        assert!(power_replacement(k, 1, &alpha, &data, &cfg()).is_err());

        let q = Field::quadratic(-1).unwrap();
        let alpha = el(q, "5");
        let data = vec![
            DescentDatum::in_field(&el(q, "1+3*i")).unwrap(),
            DescentDatum::in_field(&el(q, "(1-3*i)/2")).unwrap(),
        ];
        let a = replacement(q, &alpha, &data, &cfg()).unwrap();
        let b = power_replacement(q, 1, &alpha, &data, &cfg()).unwrap();
        for (x, y) in a.gammas.iter().zip(&b.gamma_lambda_values) {
            assert!(equal_up_to_unit(x, y));
        }
        let u = el(q, "i");
        let data = vec![DescentDatum::in_field(&u).unwrap()];
        let r = power_replacement(q, 1, &u, &data, &cfg()).unwrap();
        assert!(r.gamma_lambda_values[0].is_unit());
    }
}
