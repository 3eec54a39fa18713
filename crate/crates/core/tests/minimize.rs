mod common;

use common::{fixture_dpas, lemmas, words};
use layered_core::decisions::is_equivalent;
use layered_core::dpa::dpa_to_layered;
use layered_core::fixtures::{self, duplicate_state, gen_parity, gen_random_dpa};
use layered_core::minimize::{
    canonicalize, central_sequence, centralize, find_covered, is_n1, is_normal, lower_covered, normalize, predicates,
    safe_minimize, separate_sccs, verify_central_sequence,
};
use layered_core::morphism::{check_isomorphic, check_morphism, LayeredMorphism};
use layered_core::semantics::layered_accept_up;
use layered_core::{Alphabet, LayeredAutomaton, LayeredBuilder};

fn build(symbols: usize, states: &[(usize, &str, Option<&str>)], edges: &[(usize, &str, &str, &str)]) -> LayeredAutomaton {
    let mut b = LayeredBuilder::new(Alphabet::letters(symbols));
    for &(x, n, p) in states {
        b.add_state(x, n, p).unwrap();
    }
    for &(x, f, s, t) in edges {
        b.add_transition(x, f, s, t).unwrap();
    }
    b.set_initial(states[0].1).unwrap();
    b.build().unwrap()
}

fn names(a: &LayeredAutomaton, x: usize) -> Vec<String> {
    let mut v: Vec<String> = a.layer_states(x).map(|s| a.name(s).to_string()).collect();
    v.sort();
    v
}

fn canonical_fixtures() -> Vec<(String, LayeredAutomaton)> {
    fixture_dpas()
        .into_iter()
        .map(|(n, d)| (n, canonicalize(&dpa_to_layered(&d)).unwrap().0))
        .collect()
}

#[test]
fn scc_separation() {
    let a = build(
        2,
        &[(1, "r", None), (2, "p", Some("r")), (2, "q", Some("r"))],
        &[(1, "r", "a", "r"), (1, "r", "b", "r"), (2, "p", "a", "q"), (2, "q", "a", "q")],
    );
    assert!(!is_n1(&a));
    let s = separate_sccs(&a).unwrap();
    assert!(is_n1(&s));
    assert_eq!(names(&s, 2), ["q"]);
    assert!(is_equivalent(&s, &a).unwrap());
    assert_eq!(separate_sccs(&s).unwrap(), s);
}

#[test]
fn parity_is_not_lowered() {
    let a = dpa_to_layered(&gen_parity(2).unwrap());
    assert!(find_covered(&a).is_none());
    assert_eq!(lower_covered(&a).unwrap(), a);
}

#[test]
fn child_replicating_its_parent_is_lowered() {
    let a = build(
        2,
        &[(1, "r", None), (2, "p", Some("r")), (3, "t", Some("p"))],
        &[(1, "r", "a", "r"), (1, "r", "b", "r"), (2, "p", "a", "p"), (2, "p", "b", "p"), (3, "t", "a", "t"), (3, "t", "b", "t")],
    );
    let low = lower_covered(&a).unwrap();
    assert_eq!(low.depth(), 1);
    assert!(is_equivalent(&low, &a).unwrap());
}

#[test]
fn lowering_example_normalizes() {
    let a = fixtures::lowering_fixture();
    assert!(!is_normal(&a));
    assert!(!predicates(&a).unwrap().normal);
    let n = normalize(&a).unwrap();
    assert!(is_normal(&n));
    assert!(is_equivalent(&n, &a).unwrap());
    assert!(n.depth() < a.depth());
}

#[test]
fn canonical_forms_are_fixpoints() {
    for (name, c) in canonical_fixtures() {
        assert_eq!(normalize(&c).unwrap(), c, "{name}");
        assert_eq!(centralize(&c).unwrap(), c, "{name}");
        let (m, map) = safe_minimize(&c).unwrap();
        assert_eq!(m, c, "{name}");
        assert_eq!(map, LayeredMorphism::identity(&c));
        let p = predicates(&c).unwrap();
        assert!(p.normal && p.safe_minimal && p.centralised, "{name}");
        let again = canonicalize(&c).unwrap().0;
        assert!(check_isomorphic(&again, &c).unwrap().is_some());
    }
}

#[test]
fn twins_are_merged() {
    let a = build(
        2,
        &[(1, "r", None), (2, "p", Some("r")), (2, "p'", Some("r"))],
        &[(1, "r", "a", "r"), (1, "r", "b", "r"), (2, "p", "a", "p'"), (2, "p'", "a", "p")],
    );
    assert!(is_normal(&a));
    assert!(!predicates(&a).unwrap().safe_minimal);
    let (m, map) = safe_minimize(&a).unwrap();
    assert_eq!(m.state_count(), a.state_count() - 1);
    assert!(check_morphism(&a, &m, &map) && map.strong && map.is_surjective(&m));
}

#[test]
fn duplicated_l2_quotients_like_the_original() {
    let quotient = |a: &LayeredAutomaton| safe_minimize(&normalize(a).unwrap()).unwrap().0;
    let plain = quotient(&dpa_to_layered(&fixtures::l2_dpa()));
    let dup = dpa_to_layered(&duplicate_state(&fixtures::l2_dpa(), 1));
    assert!(!predicates(&dup).unwrap().safe_minimal);
    assert!(check_isomorphic(&quotient(&dup), &plain).unwrap().is_some());
}

#[test]
fn smaller_safe_language_is_removed() {
    let a = build(
        2,
        &[(1, "r", None), (2, "p", Some("r")), (2, "q", Some("r"))],
        &[(1, "r", "a", "r"), (1, "r", "b", "r"), (2, "p", "a", "p"), (2, "q", "a", "q"), (2, "q", "b", "q")],
    );
    let c = centralize(&a).unwrap();
    assert_eq!(names(&c, 2), ["q"]);
    assert!(is_equivalent(&c, &a).unwrap());
    let emb = LayeredMorphism::by_name(&c, &a, false).unwrap();
    assert!(check_morphism(&c, &a, &emb));
}

#[test]
fn l4_keeps_three_maximal_components() {
    let a = dpa_to_layered(&fixtures::l4_dpa());
    let c = canonicalize(&a).unwrap().0;
    assert_eq!(c.layer_len(1), 1);
    assert_eq!(c.layer_len(2), 3);
    // each survivor reads exactly two letters
    for s in c.layer_states(2) {
        assert_eq!(c.subtree(s).len(), 1);
        assert_eq!(layered_letters(&c, s).len(), 2);
    }
}

fn layered_letters(a: &LayeredAutomaton, s: layered_core::StateId) -> std::collections::BTreeSet<usize> {
    // letters readable somewhere in the SCC of s
    let mut seen = vec![s];
    let mut letters = std::collections::BTreeSet::new();
    let mut i = 0;
    while i < seen.len() {
        let u = seen[i];
        for l in a.letters(u) {
            letters.insert(l);
            let t = a.succ(u, l).unwrap();
            if !seen.contains(&t) {
                seen.push(t);
            }
        }
        i += 1;
    }
    letters
}

#[test]
fn canonical_size_never_grows() {
    for (_, d) in fixture_dpas() {
        for v in [d.clone(), duplicate_state(&d, 0), fixtures::pad_unreachable(&d, 3)] {
            let a = dpa_to_layered(&v);
            let c = canonicalize(&a).unwrap().0;
            assert!(c.state_count() <= a.state_count());
            assert!(c.leaves().len() <= a.leaves().len());
        }
    }
}

#[test]
fn stages_preserve_language_on_random_conversions() {
    for seed in 0..100 {
        let d = gen_random_dpa(seed, 1 + (seed % 6) as usize, 2, 1 + (seed % 4) as u32).unwrap();
        let a = dpa_to_layered(&d);
        let s = separate_sccs(&a).unwrap();
        let l = lower_covered(&s).unwrap();
        let n = normalize(&a).unwrap();
        let (m, _) = safe_minimize(&n).unwrap();
        let c = centralize(&m).unwrap();
        for (stage, out) in [("separate", &s), ("lower", &l), ("normalize", &n), ("safemin", &m), ("centralize", &c)] {
            assert!(is_equivalent(out, &a).unwrap(), "seed {seed} {stage}");
        }
        for w in words(2, 2, 2) {
            assert_eq!(layered_accept_up(&c, &w).unwrap().0, d.accepts(&w));
        }
    }
}

#[test]
fn equivalent_inputs_have_isomorphic_canonical_forms() {
    let inputs: Vec<LayeredAutomaton> = (0..40)
        .map(|s| dpa_to_layered(&gen_random_dpa(s, 2, 2, 2).unwrap()))
        .collect();
    let canon: Vec<LayeredAutomaton> = inputs.iter().map(|a| canonicalize(a).unwrap().0).collect();
    let mut pairs = 0;
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            let eq = is_equivalent(&inputs[i], &inputs[j]).unwrap();
            assert_eq!(eq, check_isomorphic(&canon[i], &canon[j]).unwrap().is_some(), "{i} {j}");
            pairs += eq as usize;
        }
    }
    assert!(pairs > 0);
}

#[test]
fn central_sequences_on_examples() {
    let p = canonicalize(&dpa_to_layered(&gen_parity(2).unwrap())).unwrap().0;
    let top = p.layer_states(2).next().unwrap();
    assert!(verify_central_sequence(&p, top, &[1]));
    assert!(!verify_central_sequence(&p, top, &[]));
    assert!(!verify_central_sequence(&p, top, &[0]));

    let l4 = canonicalize(&dpa_to_layered(&fixtures::l4_dpa())).unwrap().0;
    let ab = [0, 1];
    let hits: Vec<_> = l4.layer_states(2).filter(|&s| verify_central_sequence(&l4, s, &ab)).collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(layered_letters(&l4, hits[0]), [0, 1].into_iter().collect());
}

#[test]
fn central_sequences_on_canonical_fixtures() {
    for (name, c) in canonical_fixtures() {
        for p in c.states().filter(|s| s.layer >= 2) {
            let z = central_sequence(&c, p).unwrap();
            lemmas::central_clauses(&c, p, &z).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
    let raw = dpa_to_layered(&duplicate_state(&fixtures::l2_dpa(), 1));
    let p = raw.layer_states(2).next().unwrap();
    assert!(central_sequence(&raw, p).is_err());
}
