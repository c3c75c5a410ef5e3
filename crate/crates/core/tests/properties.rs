use overlap_gen::fixtures;
use overlap_gen::genfn::UnaryFn;
use overlap_gen::pair::{eval_overlap, GeneratorPair};
use overlap_gen::report::fmt_g17;
use overlap_gen::transform::affine_outer;
use overlap_gen::xreal::{AffineMap, XReal};
use proptest::prelude::*;

fn xreal() -> impl Strategy<Value = XReal> {
    prop_oneof![
        1 => Just(XReal::NegInf),
        1 => Just(XReal::PosInf),
        6 => (-1e6f64..1e6).prop_map(XReal::new),
    ]
}

fn valid_pairs() -> Vec<GeneratorPair> {
    vec![
        fixtures::product_pair(),
        fixtures::reciprocal_cauchy_pair(),
        fixtures::extended_product_pair(),
        fixtures::neg_log_cauchy_pair(),
        fixtures::shifted_product_pair(),
    ]
}

proptest! {
    #[test]
    fn xadd_commutes(a in xreal(), b in xreal()) {
        prop_assert_eq!(a.xadd(b), b.xadd(a));
    }

    #[test]
    fn xadd_indeterminate_only_for_opposite_infinities(a in xreal(), b in xreal()) {
        let opposite = matches!((a, b), (XReal::PosInf, XReal::NegInf) | (XReal::NegInf, XReal::PosInf));
        prop_assert_eq!(a.xadd(b).is_err(), opposite);
    }

    #[test]
    fn negation_is_involutive(a in xreal()) {
        prop_assert_eq!(-(-a), a);
    }

    #[test]
    fn overlap_is_symmetric_and_in_range(i in 0usize..5, x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let p = &valid_pairs()[i];
        let v = eval_overlap(p, x, y).unwrap();
        prop_assert_eq!(v.to_bits(), eval_overlap(p, y, x).unwrap().to_bits());
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn overlap_is_non_decreasing(i in 0usize..5, x in 0.0f64..=1.0, dx in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let p = &valid_pairs()[i];
        let x2 = (x + dx).min(1.0);
        prop_assert!(eval_overlap(p, x, y).unwrap() <= eval_overlap(p, x2, y).unwrap() + 1e-15);
    }

    #[test]
    fn affine_outer_preserves_overlap(
        k in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
        b in -5.0f64..5.0,
        x in 0.0f64..=1.0,
        y in 0.0f64..=1.0,
    ) {
        let p = fixtures::product_pair();
        let t = affine_outer(&p, k, b).unwrap().pair;
        prop_assert!((eval_overlap(&t, x, y).unwrap() - x * y).abs() <= 1e-9);
    }

    #[test]
    fn g17_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), if v == 0.0 { 0.0 } else { v });
    }

    #[test]
    fn affine_descriptors_round_trip(k in -10.0f64..10.0, b in -10.0f64..10.0) {
        let f = UnaryFn::affine_outer(AffineMap::new(k, b), UnaryFn::neg_log());
        let back: UnaryFn = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}
