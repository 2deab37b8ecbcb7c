use serde_json::{json, Value};

use quadfield::classgrp::{class_info, is_principal};
use quadfield::ideals::{factor_ideal, parse_ideal, refine_factorization, IntegralIdeal};
use quadfield::qfield::{mahler_measure_over, minimal_polynomial, parse_element, weil_height_at, Field, FieldElement};
use quadfield::replace::{
    certify_power, certify_replacement, norm_descent, power_replacement, replacement, CertificateReport,
    DescentDatum, HeightCheck,
};
use quadfield::tmetric::{tmetric as tmetric_search, tmetric_infty_rank1, TExponent, TMetricResult};
use quadfield::units::{is_field_balanced, unit_group};
use quadfield::verify::{run_suite, VerifyConfig, SUITES};
use quadfield::{Error, Result};

use crate::render::height;
use crate::Ctx;

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(T::to_string).collect()
}

pub fn field_info(field: Field, _ctx: &Ctx) -> Result<Value> {
    let units = unit_group(field);
    let verdict = is_field_balanced(field)?;
    let class = class_info(field)?;
    let (r1, r2) = match field.quad() {
        Some(k) => k.signature(),
        None => (1, 0),
    };
    Ok(json!({
        "field": field.to_string(),
        "d": field.d(),
        "discriminant": field.discriminant(),
        "degree": field.degree(),
        "signature": [r1, r2],
        "unit_group": {
            "torsion_order": units.torsion_order,
            "rank": units.rank,
            "fundamental_unit": units.fundamental_unit.as_ref().map(|u| u.to_string()),
        },
        "balanced": verdict.balanced,
        "witness": verdict.witness.as_ref().map(|w| w.to_string()),
        "criterion_holds": verdict.criterion_holds,
        "criterion_strict_holds": verdict.criterion_strict_holds,
        "minkowski_bound": class.minkowski_bound.to_string(),
        "class_number": class.class_number.or(class.class_number_one.then_some(1)),
        "class_number_one": class.class_number_one,
        "nonprincipal_witness": class.nonprincipal_witness.as_ref().map(|i| i.generator_form()),
    }))
}

pub fn element_height(field: Field, text: &str, ctx: &Ctx) -> Result<Value> {
    let x = parse_element(field, text)?;
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(json!({
        "field": field.to_string(),
        "element": x.to_string(),
        "minimal_polynomial": strings(&minimal_polynomial(&x)),
        "height": height(&weil_height_at(&x, ctx.precision)?),
    }))
}

pub fn element_measure(field: Field, text: &str, _ctx: &Ctx) -> Result<Value> {
    let x = parse_element(field, text)?;
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(json!({
        "field": field.to_string(),
        "element": x.to_string(),
        "minimal_polynomial": strings(&minimal_polynomial(&x)),
        "mahler_measure": height(&mahler_measure_over(Field::Rational, &x)?),
    }))
}

pub fn ideal_factor(field: Field, text: &str) -> Result<Value> {
    let i = parse_ideal(field, text)?;
    let primes: Vec<Value> = factor_ideal(&i)?
        .iter()
        .map(|(p, e)| {
            json!({
                "prime": p.ideal().generator_form(),
                "hnf": p.to_string(),
                "p": p.p().to_string(),
                "split_type": p.split_type().to_string(),
                "exponent": e,
            })
        })
        .collect();
    let generator = match is_principal(&i) {
        Ok(g) => json!(g.map(|g| g.to_string())),
        Err(Error::SearchLimit(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "field": field.to_string(),
        "ideal": i.to_string(),
        "generators": i.generator_form(),
        "norm": i.norm().to_string(),
        "factorization": primes,
        "principal_generator": generator,
    }))
}

pub fn ideal_refine(field: Field, text: &str, parts: &[String]) -> Result<Value> {
    let i = parse_ideal(field, text)?;
    let js = parts.iter().map(|p| parse_ideal(field, p)).collect::<Result<Vec<_>>>()?;
    let refined = refine_factorization(&i, &js)?;
    let rows: Vec<Value> = refined
        .iter()
        .zip(&js)
        .map(|(x, j)| {
            json!({
                "part": x.generator_form(),
                "hnf": x.to_string(),
                "norm": x.norm().to_string(),
                "contains": j.generator_form(),
            })
        })
        .collect();
    Ok(json!({
        "field": field.to_string(),
        "ideal": i.generator_form(),
        "parts": rows,
    }))
}

fn height_check(c: &HeightCheck) -> Value {
    json!({
        "index": c.index,
        "height": height(&c.lhs),
        "bound": height(&c.rhs),
        "comparison": c.comparison.to_string(),
        "exact": c.exact,
        "holds": c.holds(),
    })
}

fn certificate(r: &CertificateReport) -> Value {
    json!({
        "product_ok": r.product_ok,
        "unit_ok": r.unit_ok,
        "no_cancellation_ok": r.no_cancellation_ok,
        "all_ok": r.all_ok(),
        "failures": r.failures,
    })
}

fn ideals(xs: &[IntegralIdeal]) -> Vec<String> {
    xs.iter().map(IntegralIdeal::generator_form).collect()
}

pub fn replace(
    field: Field,
    lambda: Option<u32>,
    alpha: &str,
    factors: &[String],
    over: Option<Field>,
    ctx: &Ctx,
) -> Result<Value> {
    let alpha = parse_element(field, alpha)?;
    let source = over.unwrap_or(field);
    let xs = factors
        .iter()
        .map(|f| parse_element(source, f))
        .collect::<Result<Vec<FieldElement>>>()?;
    let data = xs
        .iter()
        .map(|x| if over.is_some() { norm_descent(x) } else { DescentDatum::in_field(x) })
        .collect::<Result<Vec<_>>>()?;
    let measures: Vec<Value> = data.iter().map(|d| height(&d.source_measure)).collect();
    let cfg = &ctx.compare;
    Ok(match lambda {
        None => {
            let r = replacement(field, &alpha, &data, cfg)?;
            let report = certify_replacement(&r, &alpha, &data, cfg);
            json!({
                "field": field.to_string(),
                "alpha": alpha.to_string(),
                "factors": strings(&xs),
                "descended": strings(&data.iter().map(|d| d.beta.clone()).collect::<Vec<_>>()),
                "source_measures": measures,
                "gamma0": r.gamma0.to_string(),
                "gammas": strings(&r.gammas),
                "numerators": ideals(&r.numerators),
                "denominators": ideals(&r.denominators),
                "unit_exponents": r.unit_exponents,
                "heights": r.certificates.iter().map(height_check).collect::<Vec<_>>(),
                "certificate": certificate(&report),
            })
        }
        Some(lambda) => {
            let r = power_replacement(field, lambda, &alpha, &data, cfg)?;
            let report = certify_power(&r, &alpha, &data, cfg);
            json!({
                "field": field.to_string(),
                "lambda": lambda,
                "alpha": alpha.to_string(),
                "factors": strings(&xs),
                "descended": strings(&data.iter().map(|d| d.beta.clone()).collect::<Vec<_>>()),
                "source_measures": measures,
                "gamma0_lambda": r.gamma0_lambda.to_string(),
                "gamma_lambda_values": strings(&r.gamma_lambda_values),
                "numerators": ideals(&r.numerators),
                "denominators": ideals(&r.denominators),
                "unit_exponents": r.unit_exponents,
                "heights": r.certificates.iter().map(height_check).collect::<Vec<_>>(),
                "certificate": certificate(&report),
            })
        }
    })
}

fn tmetric_record(r: &TMetricResult) -> Value {
    let v = height(&r.value);
    json!({
        "field": r.field.to_string(),
        "alpha": r.alpha.to_string(),
        "t": r.t.to_string(),
        "value": v["decimal"],
        "exact_form": v["exact"],
        "value_interval": v["interval"],
        "factors": strings(&r.factors),
        "factor_measures": r.measures.iter().map(height).collect::<Vec<_>>(),
        "unit_factor": r.unit_factor.to_string(),
        "split": r.attaining.to_string(),
        "ties": strings(&r.ties),
        "certificate": {
            "nodes": r.certificate.nodes,
            "near_optimal": r.certificate.near_optimal,
            "exact": r.certificate.exact,
            "note": r.certificate.note,
        },
    })
}

pub fn tmetric(field: Field, alpha: &str, ts: &[TExponent], ctx: &Ctx) -> Result<Value> {
    let alpha = parse_element(field, alpha)?;
    let mut out = Vec::with_capacity(ts.len());
    for t in ts {
        let r = if field.is_real_quadratic() {
            if !t.is_infinite() {
                return Err(Error::UnsupportedField(format!(
                    "{field} is real; only t = inf is supported there"
                )));
            }
            tmetric_infty_rank1(field, &alpha, &ctx.compare)?
        } else {
            tmetric_search(field, &alpha, t, &ctx.compare)?
        };
        out.push(tmetric_record(&r));
    }
    Ok(Value::Array(out))
}

/// The reports, and whether every suite passed.
pub fn verify(suite: &str, cases: Option<u64>, seed: u64, oracle_bound: u64, ctx: &Ctx) -> Result<(Value, bool)> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::InvalidArgument(format!(
            "unknown suite {suite:?}; expected all or one of {}",
            SUITES.join(", ")
        )));
    };
    let cfg = VerifyConfig {
        seed,
        cases,
        oracle_bound,
        compare: ctx.compare,
    };
    let mut ok = true;
    let mut reports = Vec::new();
    for name in names {
        let r = run_suite(name, &cfg)?;
        eprintln!("{r}");
        ok &= r.passed();
        reports.push(json!({
            "suite": r.name,
            "cases": r.cases,
            "failures": r.failure_count,
            "passed": r.passed(),
            "messages": r.failures,
        }));
    }
    Ok((Value::Array(reports), ok))
}
