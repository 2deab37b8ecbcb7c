use num_bigint::BigInt;
use proptest::prelude::*;

use quadfield::ideals::{coprime_split, factor_ideal, is_coprime, prime_split, refine_factorization, IntegralIdeal};
use quadfield::qfield::{Field, FieldElement};

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn field(k: usize) -> Field {
    match k {
        0 => Field::Rational,
        1 => Field::quadratic(-1).unwrap(),
        2 => Field::quadratic(-5).unwrap(),
        _ => Field::quadratic(10).unwrap(),
    }
}

/// Product of the chosen primes above the chosen rational primes.
fn ideal_from(f: Field, picks: &[(usize, usize)]) -> IntegralIdeal {
    let mut i = IntegralIdeal::unit(f);
    for &(p, side) in picks {
        let above = prime_split(f, &BigInt::from(PRIMES[p])).unwrap();
        i = i.mul(above[side % above.len()].ideal()).unwrap();
    }
    i
}

fn picks(max: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..PRIMES.len(), 0usize..2), 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_multiplicative(k in 0usize..4, a in picks(4), b in picks(4)) {
        let f = field(k);
        let (x, y) = (ideal_from(f, &a), ideal_from(f, &b));
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.norm(), x.norm() * y.norm());
        prop_assert_eq!(&xy, &y.mul(&x).unwrap());
        let v = factor_ideal(&xy).unwrap();
        prop_assert_eq!(v.to_ideal(f).unwrap(), xy.clone());
        prop_assert_eq!(v, factor_ideal(&x).unwrap().plus(&factor_ideal(&y).unwrap()));
    }

    #[test]
    fn inclusion_is_divisibility(k in 0usize..4, a in picks(4), b in picks(4)) {
        let f = field(k);
        let (i, j) = (ideal_from(f, &a), ideal_from(f, &b));
        let (vi, vj) = (factor_ideal(&i).unwrap(), factor_ideal(&j).unwrap());
        let divides = vi.iter().all(|(p, e)| vj.get(p) >= e);
        prop_assert_eq!(i.contains(&j), divides);
    }

    #[test]
    fn coprime_cross_relation(k in 0usize..4, a in picks(3), b in picks(3), c in picks(3)) {
        // I, I' with disjoint supports; J = I K, J' = I' K gives I J' = I' J.
        let f = field(k);
        let i = ideal_from(f, &a.iter().filter(|(p, _)| p % 2 == 0).copied().collect::<Vec<_>>());
        let i2 = ideal_from(f, &b.iter().filter(|(p, _)| p % 2 == 1).copied().collect::<Vec<_>>());
        prop_assume!(is_coprime(&i, &i2).unwrap());
        let kk = ideal_from(f, &c);
        let (j, j2) = (i.mul(&kk).unwrap(), i2.mul(&kk).unwrap());
        prop_assert_eq!(i.mul(&j2).unwrap(), i2.mul(&j).unwrap());
        prop_assert!(i.contains(&j));
        prop_assert!(i2.contains(&j2));
    }

    #[test]
    fn refine_postconditions(k in 0usize..3, a in picks(6), split in prop::collection::vec(0usize..3, 6), extra in picks(3)) {
        let f = field(k);
        let i = ideal_from(f, &a);
        prop_assume!(i.norm() <= BigInt::from(10_000));
        let mut parts = vec![Vec::new(); 3];
        for (n, pick) in a.iter().enumerate() {
            parts[split[n]].push(*pick);
        }
        for (n, e) in extra.iter().enumerate() {
            parts[n % 3].push(*e);
        }
        let js: Vec<IntegralIdeal> = parts.iter().map(|p| ideal_from(f, p)).collect();
        let out = refine_factorization(&i, &js).unwrap();
        let prod = out.iter().fold(IntegralIdeal::unit(f), |x, y| x.mul(y).unwrap());
        prop_assert_eq!(prod, i);
        for (x, j) in out.iter().zip(&js) {
            prop_assert!(x.contains(j));
        }
    }

    #[test]
    fn coprime_split_of_elements(k in 0usize..4, p in -40i64..40, q in -40i64..40, den in 1i64..30) {
        prop_assume!(p != 0 || q != 0);
        let f = field(k);
        let q = if f.is_rational() { 0 } else { q };
        prop_assume!(p != 0 || q != 0);
        let x = FieldElement::new(f, p.into(), q.into(), den.into()).unwrap();
        let r = coprime_split(&x).unwrap();
        prop_assert!(is_coprime(r.numerator(), r.denominator()).unwrap());
        // (x) * denominator = numerator
        let px = IntegralIdeal::principal(&(&x * &FieldElement::from_int(f, den))).unwrap();
        let lhs = px.mul(r.denominator()).unwrap();
        let rhs = r.numerator().mul(&IntegralIdeal::from_int(f, den).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn refine_rejects_missing_containment() {
    let f = Field::Rational;
    let i = IntegralIdeal::from_int(f, 12).unwrap();
    let js = [IntegralIdeal::from_int(f, 2).unwrap(), IntegralIdeal::from_int(f, 3).unwrap()];
    assert!(refine_factorization(&i, &js).is_err());
}
