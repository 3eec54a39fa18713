mod common;

use common::{fixture_cases, words};
use layered_core::decisions::{
    check_consistent, is_empty, is_empty_unchecked, is_equivalent, is_included, language_classes, state_lang_equal,
};
use layered_core::dpa::dpa_to_layered;
use layered_core::fixtures::{self, duplicate_state, gen_parity, gen_random_dpa};
use layered_core::alternating::cobuchi_to_layered;
use layered_core::minimize::canonicalize;
use layered_core::semantics::layered_accept_up;
use layered_core::{Alphabet, Dpa, Error, LayeredAutomaton};

fn canonical(d: &Dpa) -> LayeredAutomaton {
    canonicalize(&dpa_to_layered(d)).unwrap().0
}

fn rejecting_everything() -> LayeredAutomaton {
    let d = Dpa::new(Alphabet::letters(3), vec!["z".into()], 0, vec![vec![(0, 1); 3]], 1).unwrap();
    dpa_to_layered(&d)
}

#[test]
fn inconsistent_fixture_witness() {
    let a = fixtures::inconsistent_fixture();
    let c = check_consistent(&a).unwrap();
    assert!(!c.consistent);
    let (p, t) = c.witness.unwrap();
    assert_eq!((a.name(p), a.name(t)), ("p", "t"));
    assert!(matches!(is_empty(&a), Err(Error::Precondition { .. })));
    assert!(is_empty_unchecked(&a).is_ok());
}

#[test]
fn conversions_and_canonical_forms_are_consistent() {
    for case in fixture_cases() {
        assert!(check_consistent(&case.automaton).unwrap().consistent, "{}", case.name);
    }
    for l in fixtures::FixtureLanguage::ALL {
        assert!(check_consistent(&canonical(&l.dpa())).unwrap().consistent);
    }
    for seed in 0..30 {
        let d = gen_random_dpa(seed, 5, 2, 4).unwrap();
        assert!(check_consistent(&dpa_to_layered(&d)).unwrap().consistent);
    }
}

#[test]
fn emptiness() {
    assert!(is_empty(&rejecting_everything()).unwrap());
    assert!(!is_empty(&canonical(&fixtures::l1_dpa())).unwrap());
    assert!(!is_empty(&dpa_to_layered(&gen_parity(2).unwrap())).unwrap());
}

#[test]
fn inclusion() {
    let l1 = fixtures::l1_layered();
    let cc = cobuchi_to_layered(&fixtures::cobuchi_finitely_many_cc()).unwrap();
    assert!(is_included(&l1, &cc).unwrap());
    assert!(!is_included(&cc, &l1).unwrap());
    assert!(is_included(&rejecting_everything(), &l1).unwrap());
    assert!(is_included(&l1, &l1).unwrap());
    for w in words(3, 3, 3) {
        // the oracle behind the expected answers
        if layered_accept_up(&l1, &w).unwrap().0 {
            assert!(layered_accept_up(&cc, &w).unwrap().0);
        }
    }
}

#[test]
fn inclusion_is_a_preorder_on_fixtures() {
    let mut by_alphabet: Vec<(String, LayeredAutomaton)> = fixture_cases()
        .into_iter()
        .filter(|c| *c.automaton.alphabet() == Alphabet::letters(2))
        .map(|c| (c.name, c.automaton))
        .collect();
    by_alphabet.extend((0..6).map(|s| (format!("random({s})"), dpa_to_layered(&gen_random_dpa(s, 3, 2, 3).unwrap()))));
    let n = by_alphabet.len();
    let inc: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| is_included(&by_alphabet[i].1, &by_alphabet[j].1).unwrap()).collect())
        .collect();
    for i in 0..n {
        assert!(inc[i][i]);
        for j in 0..n {
            for k in 0..n {
                if inc[i][j] && inc[j][k] {
                    assert!(inc[i][k], "{} {} {}", by_alphabet[i].0, by_alphabet[j].0, by_alphabet[k].0);
                }
            }
        }
    }
}

#[test]
fn equivalence() {
    let a = dpa_to_layered(&fixtures::l3_dpa());
    assert!(is_equivalent(&a, &a).unwrap());
    assert!(is_equivalent(&a, &canonicalize(&a).unwrap().0).unwrap());
    assert!(is_equivalent(&dpa_to_layered(&fixtures::l2_dpa()), &dpa_to_layered(&fixtures::l2_alt_dpa())).unwrap());
    assert!(!is_equivalent(&dpa_to_layered(&fixtures::l2_dpa()), &dpa_to_layered(&fixtures::l3_dpa())).unwrap());
}

#[test]
fn different_alphabets_are_not_compared_silently() {
    let l1 = fixtures::l1_layered();
    let l2 = dpa_to_layered(&fixtures::l2_dpa());
    assert!(!matches!(is_equivalent(&l1, &l2), Ok(true)));
}

#[test]
fn residual_equality() {
    let a = canonical(&fixtures::l2_dpa());
    let roots: Vec<_> = a.layer_states(1).collect();
    assert_eq!(roots.len(), 2);
    assert!(state_lang_equal(&a, roots[0], roots[0]).unwrap());
    assert!(!state_lang_equal(&a, roots[0], roots[1]).unwrap());
    assert!(state_lang_equal(&a, roots[0], a.layer_states(2).next().unwrap()).is_err());

    // L4 is prefix independent; the duplicated state has the same residual
    let d = duplicate_state(&fixtures::l4_dpa(), 1);
    let b = dpa_to_layered(&d);
    let classes = language_classes(&b).unwrap();
    assert!(classes.iter().all(|&c| c == classes[0]));
    let roots: Vec<_> = b.layer_states(1).collect();
    assert!(roots.len() > 1);
    assert!(state_lang_equal(&b, roots[0], roots[roots.len() - 1]).unwrap());
}

/// Bounded evaluation never contradicts the games on random conversions: a bounded witness
/// refutes emptiness and inclusion, and when no bounded witness exists the game answers must
/// agree whenever the exact DPA product is decisive.
#[test]
fn oracle_agreement_on_random_conversions() {
    let ws = words(2, 5, 5);
    for seed in 0..200u64 {
        let d = gen_random_dpa(seed, 1 + (seed % 5) as usize, 2, 1 + (seed % 4) as u32).unwrap();
        let e = gen_random_dpa(seed + 500, 1 + (seed % 3) as usize, 2, 1 + (seed % 3) as u32).unwrap();
        let (a, b) = (dpa_to_layered(&d), dpa_to_layered(&e));
        let some_word = ws.iter().any(|w| d.accepts(w));
        let empty = is_empty(&a).unwrap();
        assert!(!(empty && some_word));
        assert_eq!(empty, d.find_difference(d.initial(), &rejecting_like(&d), 0).is_none());
        let bounded_counter = ws.iter().any(|w| d.accepts(w) && !e.accepts(w));
        let inc = is_included(&a, &b).unwrap();
        assert!(!(inc && bounded_counter), "seed {seed}");
        assert_eq!(inc, d.is_included_in(&e), "seed {seed}");
        assert_eq!(is_equivalent(&a, &b).unwrap(), d.is_included_in(&e) && e.is_included_in(&d));
    }
}

fn rejecting_like(d: &Dpa) -> Dpa {
    let k = d.alphabet().len();
    Dpa::new(d.alphabet().clone(), vec!["z".into()], 0, vec![vec![(0, 1); k]], 1).unwrap()
}
