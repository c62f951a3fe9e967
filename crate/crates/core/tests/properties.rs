mod common;

use proptest::collection::{btree_map, vec};
use proptest::prelude::*;

use common::*;

fn terms() -> impl Strategy<Value = Terms> {
    vec((-2i64..=2, vec(-3i64..=3, 0..3)), 0..3)
}

fn torus_terms() -> impl Strategy<Value = Vec<(i64, i64, i32, i64)>> {
    vec((-1i64..=1, -1i64..=1, -1i32..=1, -2i64..=2), 0..4)
}

fn poles() -> impl Strategy<Value = Vec<(i64, u32)>> {
    btree_map(-3i64..=3, 1u32..=3, 0..3).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn diff_multiplication_is_associative(a in terms(), b in terms(), c in terms()) {
        prop_assert!(assoc_diff(&a, &b, &c));
    }

    #[test]
    fn q_multiplication_is_associative(a in terms(), b in terms(), c in terms()) {
        prop_assert!(assoc_q(&a, &b, &c));
    }

    #[test]
    fn torus_multiplication_is_associative(a in torus_terms(), b in torus_terms(), c in torus_terms()) {
        prop_assert!(assoc_torus(&a, &b, &c));
    }

    #[test]
    fn ratfunc_arithmetic_matches_evaluation(
        na in vec(-4i64..=4, 0..4), ra in poles(), nb in vec(-4i64..=4, 0..4), rb in poles(), s in -2i64..=2,
    ) {
        prop_assert!(ratfunc_arith(&na, &ra, &nb, &rb, s));
    }

    #[test]
    fn partial_fractions_recombine_exactly(num in vec(-4i64..=4, 0..6), roots in poles()) {
        prop_assert!(partial_fractions_recombine(&num, &roots));
    }

    #[test]
    fn exp_inverts_log(r in vec((-5i64..=5, 1i64..=4), 0..5)) {
        prop_assert!(exp_log(&r, 6));
    }

    #[test]
    fn print_then_parse_is_identity(seed in vec(any::<u8>(), 40)) {
        prop_assert!(print_parse_roundtrip(&expr(&seed)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn representation_is_multiplicative(a in terms(), b in terms()) {
        prop_assert!(homomorphism(&a, &b, 5));
    }

    #[test]
    fn cube_elaborates_as_product(seed in vec(any::<u8>(), 40)) {
        prop_assert!(cube_matches_product(&expr(&seed)));
    }

    #[test]
    fn determinant_depends_on_pth_powers(a in terms(), p in prop::sample::select(vec![3u64, 5, 7])) {
        prop_assert!(det_in_pth_powers(&a, p));
    }
}
