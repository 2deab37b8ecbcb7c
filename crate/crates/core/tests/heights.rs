use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use quadfield::qfield::{abs_values, compare_heights, weil_height, Field, FieldElement};
use quadfield::realnum::{CompareConfig, Comparison, Dyadic, RealInterval};
use quadfield::units::roots_of_unity;

const FIELDS: [i64; 6] = [-1, -3, -5, 2, 3, 5];

fn element() -> impl Strategy<Value = FieldElement> {
    (0..FIELDS.len(), -60i64..60, -60i64..60, 1i64..20)
        .prop_filter("nonzero", |(_, p, q, _)| *p != 0 || *q != 0)
        .prop_map(|(k, p, q, den)| {
            let f = Field::quadratic(FIELDS[k]).unwrap();
            FieldElement::new(f, p.into(), q.into(), den.into()).unwrap()
        })
}

fn pair() -> impl Strategy<Value = (FieldElement, FieldElement)> {
    (element(), -60i64..60, -60i64..60, 1i64..20)
        .prop_filter("nonzero", |(_, p, q, _)| *p != 0 || *q != 0)
        .prop_map(|(x, p, q, den)| {
            let y = FieldElement::new(x.field(), p.into(), q.into(), den.into()).unwrap();
            (x, y)
        })
}

fn cfg() -> CompareConfig {
    CompareConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arithmetic_laws((x, y) in pair()) {
        let z = &x + &y;
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &z, &(&x * &x) + &(&x * &y));
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.try_div(&y).unwrap().try_mul(&y).unwrap(), x.clone());
        prop_assert_eq!((&x * &x.conjugate()).as_rational(), Some(x.norm()));
    }

    #[test]
    fn height_axioms((x, y) in pair()) {
        let h = weil_height(&x).unwrap();
        for n in [-3i64, -2, -1, 1, 2, 3] {
            let hn = weil_height(&x.pow(n).unwrap()).unwrap();
            prop_assert_eq!(compare_heights(&hn, &h.scale(n.unsigned_abs() as u32), &cfg()).unwrap(), Comparison::Tie);
        }
        prop_assert!(weil_height(&x.pow(0).unwrap()).unwrap().is_zero());
        let hy = weil_height(&y).unwrap();
        let hxy = weil_height(&(&x * &y)).unwrap();
        // certified: upper end of h(xy) against lower end of h(x) + h(y), with rounding slack
        let sum = h.numeric().add(hy.numeric());
        prop_assert!(hxy.numeric().lo() <= sum.hi());
        prop_assert_eq!(compare_heights(&weil_height(&x.conjugate()).unwrap(), &h, &cfg()).unwrap(), Comparison::Tie);
        for z in roots_of_unity(x.field()) {
            prop_assert_eq!(compare_heights(&weil_height(&(&z * &x)).unwrap(), &h, &cfg()).unwrap(), Comparison::Tie);
        }
    }

    #[test]
    fn product_formula(x in element()) {
        let prod = abs_values(&x)
            .unwrap()
            .iter()
            .fold(RealInterval::from_int(1, 128), |acc, (_, v)| acc.mul(v));
        prop_assert!(prod.contains(&Dyadic::one()), "{x}: {prod}");
    }

    #[test]
    fn imaginary_heights_are_exact(x in element().prop_filter("imaginary", |x| x.field().is_imaginary_quadratic())) {
        let h = weil_height(&x).unwrap();
        prop_assert!(h.exact_form().is_some());
        // comparisons reduce to integers: h(x) <= h(x^2)
        let h2 = weil_height(&(&x * &x)).unwrap();
        let (a, b) = (h.exact_form().unwrap(), h2.exact_form().unwrap());
        let lhs = num_traits::pow(a.m().clone(), b.n() as usize);
        let rhs = num_traits::pow(b.m().clone(), a.n() as usize);
        prop_assert!(lhs <= rhs);
    }
}

#[test]
fn zero_has_no_height() {
    let f = Field::quadratic(-1).unwrap();
    assert!(weil_height(&FieldElement::new(f, BigInt::zero(), BigInt::zero(), 1.into()).unwrap()).is_err());
}
