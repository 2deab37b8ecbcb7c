use super::{factor_ideal, IntegralIdeal};
use crate::error::{Error, Result, ValuationMismatch};

/// Split `i` into factors `I_1 ... I_N` with `J_n ⊆ I_n`, given `∏ J_n ⊆ I`.
///
/// `I_n = J_n + I / (I_1 ... I_{n-1})`, taken in the given order of `js`.
pub fn refine_factorization(i: &IntegralIdeal, js: &[IntegralIdeal]) -> Result<Vec<IntegralIdeal>> {
    let field = i.field();
    let mut prod = IntegralIdeal::unit(field);
    for j in js {
        prod = prod.mul(j)?;
    }
    if !i.contains(&prod) {
        return Err(Error::NotContained(offending_prime(i, &prod)?));
    }
    let mut rest = i.clone();
    let mut out = Vec::with_capacity(js.len());
    for j in js {
        let part = j.add(&rest)?;
        rest = rest.quotient(&part)?;
        out.push(part);
    }
    if !rest.is_unit() {
        return Err(Error::Inconsistent(format!(
            "refinement left the cofactor {rest}"
        )));
    }
    Ok(out)
}

fn offending_prime(i: &IntegralIdeal, prod: &IntegralIdeal) -> Result<ValuationMismatch> {
    let vi = factor_ideal(i)?;
    let vp = factor_ideal(prod)?;
    for (p, e) in vi.iter() {
        let have = vp.get(p);
        if have < e {
            return Ok(ValuationMismatch {
                prime: p.to_string(),
                in_ideal: e,
                in_product: have,
            });
        }
    }
    Err(Error::Inconsistent("containment failed without a deficient prime".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::parse_ideal;
    use crate::qfield::Field;

    #[test]
    fn known_refinements() {
        let z = Field::Rational;
        let id = |f, s| parse_ideal(f, s).unwrap();
        let out = refine_factorization(&id(z, "(12)"), &[id(z, "(6)"), id(z, "(6)")]).unwrap();
        assert_eq!(out, vec![id(z, "(6)"), id(z, "(2)")]);

        let f = Field::quadratic(-5).unwrap();
        let p = id(f, "(2, 1+sqrt(-5))");
        let out = refine_factorization(&id(f, "(2)"), &[p.clone(), p.clone()]).unwrap();
        assert_eq!(out, vec![p.clone(), p.clone()]);

        let q = id(f, "(3, 1+sqrt(-5))");
        assert_eq!(refine_factorization(&q, &[id(f, "(6)")]).unwrap(), vec![q.clone()]);
    }

    #[test]
    fn rejects_with_offending_prime() {
        let z = Field::Rational;
        let err = refine_factorization(
            &parse_ideal(z, "(12)").unwrap(),
            &[parse_ideal(z, "(2)").unwrap(), parse_ideal(z, "(3)").unwrap()],
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::NotContained(ValuationMismatch {
                prime: "(2)".into(),
                in_ideal: 2,
                in_product: 1
            })
        );
    }
}
