use num_traits::{One, Signed};
use proptest::prelude::*;

use quadfield::arith::is_squarefree;
use quadfield::classgrp::{class_number_one, is_principal, minimal_height_generator, minimize_over_units};
use quadfield::ideals::{FractionalIdealRatio, IntegralIdeal};
use quadfield::qfield::{compare_heights, weil_height, Field, FieldElement};
use quadfield::realnum::{CompareConfig, Comparison};
use quadfield::units::{balancing_window, fundamental_unit, is_field_balanced};

const REAL: [i64; 8] = [2, 3, 5, 6, 7, 13, 14, 21];

fn real_field(k: usize) -> Field {
    Field::quadratic(REAL[k]).unwrap()
}

/// `|σ_i(x)|` for both real embeddings.
fn abs_pair(x: &FieldElement) -> (f64, f64) {
    let (a, b) = x.to_f64_pair();
    (a.abs(), b.abs())
}

#[test]
fn fundamental_units_are_minimal() {
    for k in 0..REAL.len() {
        let f = real_field(k);
        let eps = fundamental_unit(f).unwrap();
        assert!(eps.norm().abs().is_one() && eps.is_integral());
        let (e1, _) = abs_pair(&eps);
        assert!(e1 > 1.0);
        let bound = 40i64;
        for a in -bound..=bound {
            for b in -bound..=bound {
                let eta = FieldElement::new(f, a.into(), b.into(), 1.into()).unwrap();
                if !eta.is_zero() && eta.is_unit() {
                    let (s1, _) = abs_pair(&eta);
                    assert!(!(s1 > 1.0 + 1e-9 && s1 < e1 - 1e-9), "{eta} is smaller than {eps}");
                }
            }
        }
    }
}

#[test]
fn criterion_implies_balanced() {
    for d in 2..=50i64 {
        if !is_squarefree(d) {
            continue;
        }
        let v = is_field_balanced(Field::quadratic(d).unwrap()).unwrap();
        if v.criterion_holds {
            assert!(v.balanced, "d = {d}");
        }
        assert_eq!(v.balanced, v.witness.is_none(), "d = {d}");
    }
}

fn real_element() -> impl Strategy<Value = FieldElement> {
    (0..REAL.len(), -300i64..300, -300i64..300)
        .prop_filter("nonzero", |(_, p, q)| *p != 0 || *q != 0)
        .prop_map(|(k, p, q)| FieldElement::new(real_field(k), p.into(), q.into(), 1.into()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn window_is_exact(x in real_element()) {
        let eps = fundamental_unit(x.field()).unwrap();
        let w = balancing_window(&x, &eps).unwrap();
        let ok = |l: i64| {
            let (a, b) = abs_pair(&eps.pow(l).unwrap().try_mul(&x).unwrap());
            (a, b)
        };
        if !w.is_empty() {
            for l in w.lo..=w.hi {
                let (a, b) = ok(l);
                prop_assert!(a >= 1.0 - 1e-12 && b >= 1.0 - 1e-12, "l = {l}: {a}, {b}");
            }
            for l in [w.lo - 1, w.hi + 1] {
                let (a, b) = ok(l);
                prop_assert!(a < 1.0 + 1e-12 || b < 1.0 + 1e-12);
            }
        }
        // a large enough norm forces a nonempty window
        let h_eps = weil_height(&eps).unwrap().to_f64();
        let log_norm = x.norm().numer().abs().to_string().parse::<f64>().unwrap().ln();
        if log_norm >= 2.0 * h_eps + 1e-9 {
            prop_assert!(!w.is_empty(), "{x}: norm {} but empty window", x.norm());
        }
    }

    #[test]
    fn principal_generators(k in 0usize..6, p in -40i64..40, q in -40i64..40) {
        let d = [-1i64, -3, -7, 2, 3, 5][k];
        let f = Field::quadratic(d).unwrap();
        prop_assume!(p != 0 || q != 0);
        let g = FieldElement::new(f, p.into(), q.into(), 1.into()).unwrap();
        let ideal = IntegralIdeal::principal(&g).unwrap();
        let found = is_principal(&ideal).unwrap().expect("principal");
        prop_assert!(g.try_div(&found).unwrap().is_unit(), "{g} vs {found}");
        let m = minimal_height_generator(&FractionalIdealRatio::integral(&ideal)).unwrap();
        prop_assert!(g.try_div(&m).unwrap().is_unit());
        let hm = weil_height(&m).unwrap();
        if let Ok(eps) = fundamental_unit(f) {
            for l in -50i64..=50 {
                let other = eps.pow(l).unwrap().try_mul(&g).unwrap();
                let c = compare_heights(&hm, &weil_height(&other).unwrap(), &CompareConfig::default()).unwrap();
                prop_assert!(c != Comparison::Greater, "{m} beaten by {other}");
            }
        }
    }
}

#[test]
fn minimize_handles_large_powers() {
    let f = Field::quadratic(2).unwrap();
    let eps = fundamental_unit(f).unwrap();
    let g = FieldElement::new(f, 3.into(), 1.into(), 1.into()).unwrap();
    let far = eps.pow(37).unwrap().try_mul(&g).unwrap();
    let m = minimize_over_units(&far, &CompareConfig::default()).unwrap();
    let base = minimize_over_units(&g, &CompareConfig::default()).unwrap();
    assert_eq!(m, base);
    assert!(class_number_one(f).unwrap());
}
