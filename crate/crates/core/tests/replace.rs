use proptest::prelude::*;

use quadfield::ideals::coprime_split;
use quadfield::qfield::{Field, FieldElement};
use quadfield::realnum::CompareConfig;
use quadfield::replace::{
    certify_power, certify_replacement, equal_up_to_unit, norm_descent, power_replacement, replacement,
    total_beta_height, DescentDatum,
};

const FIELDS: [i64; 6] = [-1, -2, -3, 2, 5, 13];

fn cfg() -> CompareConfig {
    CompareConfig::default()
}

fn field(k: usize) -> Field {
    Field::quadratic(FIELDS[k]).unwrap()
}

fn element(f: Field, (p, q, den): (i64, i64, i64)) -> FieldElement {
    FieldElement::new(f, p.into(), q.into(), den.into()).unwrap()
}

fn coords(c: i64, den: i64) -> impl Strategy<Value = (i64, i64, i64)> {
    (-c..=c, -c..=c, 1..=den).prop_filter("nonzero", |(p, q, _)| *p != 0 || *q != 0)
}

fn data_of(xs: &[FieldElement]) -> Vec<DescentDatum> {
    xs.iter().map(|x| DescentDatum::in_field(x).unwrap()).collect()
}

fn product(f: Field, xs: &[FieldElement]) -> FieldElement {
    xs.iter().fold(FieldElement::from_int(f, 1), |a, x| &a * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificates_hold(k in 0usize..6, raw in prop::collection::vec(coords(12, 5), 1..4), pi in coords(6, 1)) {
        let f = field(k);
        let mut xs: Vec<FieldElement> = raw.into_iter().map(|c| element(f, c)).collect();
        let n = xs.len();
        if n > 1 {
            let pi = element(f, pi);
            xs[0] = &xs[0] * &pi;
            xs[n - 1] = xs[n - 1].try_div(&pi).unwrap();
        }
        let alpha = product(f, &xs);
        prop_assume!(!alpha.is_zero());
        let data = data_of(&xs);
        let out = replacement(f, &alpha, &data, &cfg()).unwrap();
        let report = certify_replacement(&out, &alpha, &data, &cfg());
        prop_assert!(report.all_ok(), "{report}");
        let total: f64 = out.gammas.iter().map(|g| quadfield::qfield::weil_height(g).unwrap().to_f64()).sum();
        prop_assert!(total <= total_beta_height(&data).unwrap() + 1e-9);
    }

    #[test]
    fn integral_input_is_kept(k in 0usize..6, raw in prop::collection::vec(coords(15, 1), 1..4)) {
        let f = field(k);
        let xs: Vec<FieldElement> = raw.into_iter().map(|c| element(f, c)).collect();
        prop_assume!(xs.iter().all(|x| !x.is_unit()));
        let alpha = product(f, &xs);
        let data = data_of(&xs);
        let out = replacement(f, &alpha, &data, &cfg()).unwrap();
        for (n, x) in xs.iter().enumerate() {
            let split = coprime_split(x).unwrap();
            prop_assert_eq!(&out.numerators[n], split.numerator(), "index {}", n);
            prop_assert!(equal_up_to_unit(&out.gammas[n], x), "{} vs {}", out.gammas[n], x);
        }
    }

    #[test]
    fn first_power_agrees(k in 0usize..6, raw in prop::collection::vec(coords(10, 4), 1..4)) {
        let f = field(k);
        let xs: Vec<FieldElement> = raw.into_iter().map(|c| element(f, c)).collect();
        let alpha = product(f, &xs);
        let data = data_of(&xs);
        let one = replacement(f, &alpha, &data, &cfg()).unwrap();
        let pow = power_replacement(f, 1, &alpha, &data, &cfg()).unwrap();
        prop_assert!(certify_power(&pow, &alpha, &data, &cfg()).all_ok());
        for (a, b) in one.gammas.iter().zip(&pow.gamma_lambda_values) {
            prop_assert!(equal_up_to_unit(a, b), "{} vs {}", a, b);
        }
        prop_assert_eq!(&one.numerators, &pow.numerators);
        prop_assert_eq!(&one.denominators, &pow.denominators);
    }

    #[test]
    fn rational_descent(k in 0usize..6, r in (1i64..60, 1i64..8), raw in prop::collection::vec(coords(9, 3), 1..4)) {
        // factors in a quadratic field with rational product, replaced over Q through their norms
        let f = field(k);
        let alpha = FieldElement::new(Field::Rational, r.0.into(), 0.into(), r.1.into()).unwrap();
        let mut xs: Vec<FieldElement> = raw.into_iter().map(|c| element(f, c)).collect();
        let rest = product(f, &xs[1..]);
        xs[0] = alpha.coerce(f).unwrap().try_div(&rest).unwrap();
        let data: Vec<DescentDatum> = xs.iter().map(|x| norm_descent(x).unwrap()).collect();
        let out = replacement(Field::Rational, &alpha, &data, &cfg()).unwrap();
        let report = certify_replacement(&out, &alpha, &data, &cfg());
        prop_assert!(report.all_ok(), "{report}");
    }
}

#[test]
fn power_replacement_in_class_number_two() {
    let f = Field::quadratic(-5).unwrap();
    let x = quadfield::qfield::parse_element(f, "1+sqrt(-5)").unwrap();
    let y = quadfield::qfield::parse_element(f, "3/(1+sqrt(-5))").unwrap();
    let alpha = &x * &y;
    let data = data_of(&[x, y]);
    assert!(replacement(f, &alpha, &data, &cfg()).is_err());
    let out = power_replacement(f, 2, &alpha, &data, &cfg()).unwrap();
    assert!(certify_power(&out, &alpha, &data, &cfg()).all_ok());
}

#[test]
fn unbalanced_field_is_rejected() {
    let f = Field::quadratic(3).unwrap();
    let x = element(f, (5, 0, 1));
    assert!(replacement(f, &x, &data_of(&[x.clone()]), &cfg()).is_err());
}
