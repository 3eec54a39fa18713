use layered_core::decisions::{check_consistent, is_equivalent};
use layered_core::dpa::dpa_to_layered;
use layered_core::fixtures::{gen_random_dpa, gen_random_layered};
use layered_core::format::{parse_layered, serialize_layered};
use layered_core::minimize::canonicalize;
use layered_core::morphism::{check_morphism, LayeredMorphism};
use layered_core::semantics::{alt_member_up, build_sem, layered_accept_up};
use layered_core::UpWord;
use proptest::prelude::*;

fn up_word(k: usize) -> impl Strategy<Value = UpWord> {
    (prop::collection::vec(0..k, 0..4), prop::collection::vec(0..k, 1..4))
        .prop_map(|(u, v)| UpWord::new(u, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_equivalent_and_smaller(seed in 0u64..10_000, states in 1usize..7, d in 1u32..5) {
        let a = dpa_to_layered(&gen_random_dpa(seed, states, 2, d).unwrap());
        let (c, report) = canonicalize(&a).unwrap();
        prop_assert!(report.normal && report.safe_minimal && report.centralised && report.consistent);
        prop_assert!(is_equivalent(&a, &c).unwrap());
        prop_assert!(c.state_count() <= a.state_count());
    }

    #[test]
    fn semantics_agrees_with_the_dpa(seed in 0u64..10_000, w in up_word(2)) {
        let d = gen_random_dpa(seed, 4, 2, 4).unwrap();
        let a = dpa_to_layered(&d);
        prop_assert_eq!(layered_accept_up(&a, &w).unwrap().0, d.accepts(&w));
        prop_assert_eq!(alt_member_up(&build_sem(&a, None).unwrap(), &w, None).unwrap(), d.accepts(&w));
    }

    #[test]
    fn identity_is_a_strong_morphism(seed in 0u64..10_000, depth in 1usize..5, width in 1usize..4) {
        let a = gen_random_layered(seed, depth, width, 2).unwrap();
        prop_assert!(a.is_valid());
        prop_assert!(check_morphism(&a, &a, &LayeredMorphism::identity(&a)));
        prop_assert_eq!(parse_layered(&serialize_layered(&a)).unwrap(), a.clone());
        // consistency is decided without error on any valid automaton
        prop_assert!(check_consistent(&a).is_ok());
    }

    #[test]
    fn suffixes_shift_letters(w in up_word(3), shift in 0usize..8) {
        let mut pos = 0;
        for _ in 0..shift {
            pos = w.next(pos);
        }
        let s = w.suffix(pos);
        let long = w.take(shift + 12);
        prop_assert_eq!(s.take(12), long[shift..].to_vec());
    }
}
