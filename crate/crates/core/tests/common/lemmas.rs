//! Checks of the structural lemmas, written against the public API only.

use std::collections::{BTreeMap, BTreeSet};

use layered_core::congruence::Congruence;
use layered_core::minimize::approx_classes;
use layered_core::semantics::safe_member_up;
use layered_core::{Dpa, Letter, LayeredAutomaton, StateId, UpWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tuples to test the congruence on: every tuple of length 1, every pair when the monoid is
/// small, and `samples` random tuples grown from non-⊥ prefixes up to one past the depth.
pub fn sample_tuples(c: &Congruence, samples: usize, seed: u64) -> Vec<Vec<usize>> {
    let n = c.monoid().len();
    let mut out: BTreeSet<Vec<usize>> = (0..n).map(|m| vec![m]).collect();
    if n * n <= 4000 {
        for a in 0..n {
            for b in 0..n {
                out.insert(vec![a, b]);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut t = vec![rng.gen_range(0..n)];
        while t.len() <= c.depth() && !c.tuple_bot(&t).unwrap() && rng.gen_bool(0.7) {
            t.push(rng.gen_range(0..n));
        }
        out.insert(t);
    }
    out.into_iter().collect()
}

/// `⊥` is closed under concatenation to the last component and under appending components.
pub fn bot_closure(c: &Congruence, tuples: &[Vec<usize>]) -> Result<(), String> {
    for t in tuples {
        if !c.tuple_bot(t).unwrap() {
            continue;
        }
        for m in 0..c.monoid().len() {
            if !c.tuple_bot(&c.concat(t, m)).unwrap() {
                return Err(format!("{t:?} is ⊥ but {t:?}·{m} is not"));
            }
            let mut longer = t.clone();
            longer.push(m);
            if !c.tuple_bot(&longer).unwrap() {
                return Err(format!("{t:?} is ⊥ but {longer:?} is not"));
            }
        }
    }
    Ok(())
}

/// `≈` is an equivalence compatible with concatenation, extension and merging, and related
/// tuples have the same safe-language signature.
pub fn congruence_laws(c: &Congruence, tuples: &[Vec<usize>]) -> Result<(), String> {
    let mut by_len: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for t in tuples {
        if !c.tuple_bot(t).unwrap() {
            by_len.entry(t.len()).or_default().push(t);
        }
    }
    let n = c.monoid().len();
    for group in by_len.values() {
        for (i, s) in group.iter().enumerate() {
            if !c.tuple_equiv(s, s).unwrap() {
                return Err(format!("{s:?} not related to itself"));
            }
            for t in group.iter().skip(i + 1).take(40) {
                let st = c.tuple_equiv(s, t).unwrap();
                if st != c.tuple_equiv(t, s).unwrap() {
                    return Err(format!("asymmetric on {s:?}, {t:?}"));
                }
                if !st {
                    continue;
                }
                if c.signature(s).unwrap() != c.signature(t).unwrap() {
                    return Err(format!("{s:?} ≈ {t:?} with different signatures"));
                }
                if s.len() >= 2 && !c.tuple_equiv(&c.merge(s), &c.merge(t)).unwrap() {
                    return Err(format!("{s:?} ≈ {t:?} but their merges differ"));
                }
                for m in 0..n {
                    if !c.tuple_equiv(&c.concat(s, m), &c.concat(t, m)).unwrap() {
                        return Err(format!("{s:?} ≈ {t:?} but not after ·{m}"));
                    }
                    let (mut s2, mut t2) = ((*s).clone(), (*t).clone());
                    s2.push(m);
                    t2.push(m);
                    if !c.tuple_equiv(&s2, &t2).unwrap() {
                        return Err(format!("{s:?} ≈ {t:?} but not after appending {m}"));
                    }
                }
            }
        }
    }
    // transitivity through class ids would be vacuous; check it on triples of one class
    for group in by_len.values() {
        let g: Vec<_> = group.iter().take(30).collect();
        for a in &g {
            for b in &g {
                for d in &g {
                    if c.tuple_equiv(a, b).unwrap() && c.tuple_equiv(b, d).unwrap() && !c.tuple_equiv(a, d).unwrap() {
                        return Err(format!("not transitive on {a:?}, {b:?}, {d:?}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Layer-1 classes coincide with residual equality: related elements agree on the given words,
/// unrelated ones come with a separating word that is checked by running the DPA.
pub fn first_layer_residuals(c: &Congruence, d: &Dpa, words: &[UpWord]) -> Result<(), String> {
    let n = c.monoid().len();
    let residual = |m: usize| -> Vec<bool> {
        let q = d.run(d.initial(), &c.monoid().word(m));
        words.iter().map(|w| d.accepts_from(q, w)).collect()
    };
    let rs: Vec<Vec<bool>> = (0..n).map(residual).collect();
    for a in 0..n {
        for b in a + 1..n {
            let same = c.tuple_equiv(&[a], &[b]).unwrap();
            if same && rs[a] != rs[b] {
                return Err(format!("elements {a} and {b} related with different residuals"));
            }
            if !same && rs[a] == rs[b] {
                // the bounded words do not separate them; a separating word must exist
                let (p, q) = (d.run(d.initial(), &c.monoid().word(a)), d.run(d.initial(), &c.monoid().word(b)));
                let w = d.find_difference(p, d, q).or_else(|| d.find_difference(q, d, p));
                if !w.is_some_and(|w| d.accepts_from(p, &w) != d.accepts_from(q, &w)) {
                    return Err(format!("elements {a} and {b} unrelated with equal residuals"));
                }
            }
        }
    }
    Ok(())
}

/// Pointed tuples stay pointed under non-⊥ concatenation and under merging.
pub fn pointedness_preserved(c: &Congruence, tuples: &[Vec<usize>]) -> Result<(), String> {
    for t in tuples {
        if c.tuple_bot(t).unwrap() || !c.tuple_pointed(t).unwrap() {
            continue;
        }
        for m in 0..c.monoid().len() {
            let tm = c.concat(t, m);
            if !c.tuple_bot(&tm).unwrap() && !c.tuple_pointed(&tm).unwrap() {
                return Err(format!("{t:?} pointed but {t:?}·{m} is not"));
            }
        }
        if t.len() >= 2 && !c.tuple_pointed(&c.merge(t)).unwrap() {
            return Err(format!("{t:?} pointed but its merge is not"));
        }
    }
    Ok(())
}

/// `≈_x` is a bisimulation on each layer that respects parents, and related states have equal
/// safe languages on the given words.
pub fn approx_bisimulation(a: &LayeredAutomaton, words: &[UpWord]) -> Result<(), String> {
    let cls = approx_classes(a).map_err(|e| e.to_string())?;
    for x in 1..=a.depth() {
        let c = &cls[x - 1];
        let states: Vec<StateId> = a.layer_states(x).collect();
        for &p in &states {
            for &q in &states {
                if p >= q || c[p.index] != c[q.index] {
                    continue;
                }
                let name = || format!("{} ≈_{x} {}", a.name(p), a.name(q));
                if x > 1 {
                    let (pp, qp) = (a.parent(p).unwrap(), a.parent(q).unwrap());
                    if cls[x - 2][pp.index] != cls[x - 2][qp.index] {
                        return Err(format!("{} with unrelated parents", name()));
                    }
                }
                for l in a.alphabet().iter() {
                    match (a.succ(p, l), a.succ(q, l)) {
                        (None, None) => {}
                        (Some(p2), Some(q2)) if c[p2.index] == c[q2.index] => {}
                        _ => return Err(format!("{} split by letter {l}", name())),
                    }
                }
                if x > 1 {
                    for w in words {
                        if safe_member_up(a, x, p, w).unwrap() != safe_member_up(a, x, q, w).unwrap() {
                            return Err(format!("{} but safe languages differ", name()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn run(a: &LayeredAutomaton, mut s: StateId, z: &[Letter]) -> Option<StateId> {
    for &l in z {
        s = a.succ(s, l)?;
    }
    Some(s)
}

/// The three clauses for `z` at `p`, evaluated state by state.
pub fn central_clauses(a: &LayeredAutomaton, p: StateId, z: &[Letter]) -> Result<(), String> {
    let x = p.layer;
    if z.is_empty() {
        return Err(format!("empty sequence for {}", a.name(p)));
    }
    if run(a, p, z) != Some(p) {
        return Err(format!("{} does not loop", a.name(p)));
    }
    let anchor = a.ancestor(p, x - 1);
    for q in a.states() {
        if q.layer < x || a.ancestor(q, x - 1) != anchor {
            continue;
        }
        let end = run(a, q, z);
        if q.layer == x && end.is_some() && end != Some(p) {
            return Err(format!("sibling {} survives elsewhere", a.name(q)));
        }
        if q.layer == x + 1 && end.is_some() {
            return Err(format!("{} above survives", a.name(q)));
        }
    }
    Ok(())
}
