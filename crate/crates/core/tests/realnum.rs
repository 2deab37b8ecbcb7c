use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use quadfield::realnum::{compare_adaptive, compare_with, eval_log_expr, CompareConfig, Comparison, LogExpr};

fn log_of(p: i64, q: i64) -> LogExpr {
    LogExpr::log_rational(BigRational::new(BigInt::from(p), BigInt::from(q))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn log_enclosure(p in 1i64..1_000_000_000, q in 1i64..1_000_000_000, bits in 64u32..512) {
        let e = log_of(p, q);
        let lo = eval_log_expr(&e, bits).unwrap();
        let hi = eval_log_expr(&e, 4 * bits).unwrap();
        prop_assert!(lo.overlaps(&hi));
        prop_assert!(lo.contains(hi.lo()) && lo.contains(hi.hi()), "{lo} does not contain {hi}");
        let f = (p as f64).ln() - (q as f64).ln();
        prop_assert!((lo.to_f64() - f).abs() <= 1e-13 * f.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn comparison_antisymmetry(a in 1i64..5000, b in 1i64..5000, c in 1i64..5000, d in 1i64..5000) {
        // log a + log b / 2  vs  log c + log d / 3
        let x = LogExpr::log_int(a).unwrap() + LogExpr::log_int(b).unwrap().scale(BigRational::new(1.into(), 2.into()));
        let y = LogExpr::log_int(c).unwrap() + LogExpr::log_int(d).unwrap().scale(BigRational::new(1.into(), 3.into()));
        let xy = compare_adaptive(&x, &y, 1e-12).unwrap();
        let yx = compare_adaptive(&y, &x, 1e-12).unwrap();
        prop_assert_eq!(xy, yx.reverse());
        prop_assert_eq!(compare_adaptive(&x, &x, 1e-12).unwrap(), Comparison::Tie);
        // integer identity: a^6 b^3 vs c^6 d^2
        let lhs = BigInt::from(a).pow(6) * BigInt::from(b).pow(3);
        let rhs = BigInt::from(c).pow(6) * BigInt::from(d).pow(2);
        let exact = match lhs.cmp(&rhs) {
            std::cmp::Ordering::Less => Comparison::Less,
            std::cmp::Ordering::Equal => Comparison::Tie,
            std::cmp::Ordering::Greater => Comparison::Greater,
        };
        prop_assert_eq!(xy, exact);
    }
}

#[test]
fn equal_values_tie() {
    let a = LogExpr::log_int(4).unwrap().scale(BigRational::new(1.into(), 2.into()));
    let b = LogExpr::log_int(2).unwrap();
    assert_eq!(compare_adaptive(&a, &b, 1e-12).unwrap(), Comparison::Tie);
    let two_log2 = LogExpr::log_int(2).unwrap().scale(BigRational::from_integer(2.into()));
    for bits in [64, 128, 1024] {
        let x = eval_log_expr(&two_log2, bits).unwrap();
        let y = eval_log_expr(&LogExpr::log_int(4).unwrap(), bits).unwrap();
        assert!(x.overlaps(&y));
    }
    let cfg = CompareConfig { start_bits: 64, max_bits: 256, tie_tolerance: 1e-300 };
    assert!(compare_with(&two_log2, &LogExpr::log_int(4).unwrap(), &cfg).is_err());
}
