//! Morphisms between layered automata and the isomorphism test for safe minimal automata.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, StateId};
use crate::semantics::safe_included;

/// A map from the states of a source automaton to the states of a target automaton. A strong
/// morphism also preserves missing transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredMorphism {
    pub map: BTreeMap<StateId, StateId>,
    pub strong: bool,
}

impl LayeredMorphism {
    pub fn identity(a: &LayeredAutomaton) -> Self {
        LayeredMorphism {
            map: a.states().map(|s| (s, s)).collect(),
            strong: true,
        }
    }

    /// Maps every state of `source` to the state of `target` with the same name.
    pub fn by_name(source: &LayeredAutomaton, target: &LayeredAutomaton, strong: bool) -> Result<Self> {
        let mut map = BTreeMap::new();
        for s in source.states() {
            map.insert(s, target.lookup_or_err(source.name(s))?);
        }
        Ok(LayeredMorphism { map, strong })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &LayeredMorphism) -> Option<LayeredMorphism> {
        let map = self
            .map
            .iter()
            .map(|(&s, t)| other.map.get(t).map(|&u| (s, u)))
            .collect::<Option<_>>()?;
        Some(LayeredMorphism {
            map,
            strong: self.strong && other.strong,
        })
    }

    pub fn is_surjective(&self, target: &LayeredAutomaton) -> bool {
        let image: std::collections::BTreeSet<StateId> = self.map.values().copied().collect();
        target.states().all(|s| image.contains(&s))
    }
}

/// Checks every clause of the morphism definition: total on the source, initial state to initial
/// state, transitions to transitions of the image's layer, ancestors to ancestors and, for strong
/// morphisms, missing transitions to missing transitions.
pub fn check_morphism(source: &LayeredAutomaton, target: &LayeredAutomaton, m: &LayeredMorphism) -> bool {
    if source.alphabet() != target.alphabet() {
        return false;
    }
    let img = |s: StateId| m.map.get(&s).copied();
    for s in source.states() {
        match img(s) {
            Some(t) if target.contains(t) => {}
            _ => return false,
        }
    }
    if img(source.initial()) != Some(target.initial()) {
        return false;
    }
    for q in source.states() {
        let fq = img(q).unwrap();
        for l in source.alphabet().iter() {
            match source.succ(q, l) {
                Some(q2) => {
                    let fq2 = img(q2).unwrap();
                    if fq2.layer != fq.layer || target.succ(fq, l) != Some(fq2) {
                        return false;
                    }
                }
                None => {
                    if m.strong && target.succ(fq, l).is_some() {
                        return false;
                    }
                }
            }
        }
        let mut p = q;
        while let Some(parent) = source.parent(p) {
            let fp = img(parent).unwrap();
            if fp.layer > fq.layer || target.ancestor(fq, fp.layer) != fp {
                return false;
            }
            p = parent;
        }
    }
    true
}

/// The unique layer-preserving isomorphism between two safe minimal automata, if any.
///
/// Layer 1 is matched by running both automata in lockstep from their initial states. The
/// children of matched states are then paired by equality of their safe languages, which
/// identifies them uniquely in a safe minimal automaton.
pub fn check_isomorphic(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Result<Option<BTreeMap<StateId, StateId>>> {
    for (m, which) in [(a, "first"), (b, "second")] {
        if !crate::minimize::is_safe_minimal(m)? {
            return Err(Error::precondition(
                "safe minimality",
                format!("{which} automaton"),
            ));
        }
    }
    Ok(match_structures(a, b))
}

/// The matching of [`check_isomorphic`] without the safe minimality check.
pub fn match_structures(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Option<BTreeMap<StateId, StateId>> {
    if a.alphabet() != b.alphabet() || a.depth() != b.depth() {
        return None;
    }
    if (1..=a.depth()).any(|x| a.layer_len(x) != b.layer_len(x)) {
        return None;
    }
    let mut fwd: HashMap<StateId, StateId> = HashMap::new();
    let mut bwd: HashMap<StateId, StateId> = HashMap::new();
    let mut bind = |s: StateId, t: StateId, fwd: &mut HashMap<StateId, StateId>| -> Option<bool> {
        match (fwd.get(&s), bwd.get(&t)) {
            (None, None) => {
                fwd.insert(s, t);
                bwd.insert(t, s);
                Some(true)
            }
            (Some(&t0), Some(&s0)) if t0 == t && s0 == s => Some(false),
            _ => None,
        }
    };
    let mut queue = VecDeque::new();
    bind(a.initial(), b.initial(), &mut fwd)?;
    queue.push_back((a.initial(), b.initial()));
    while let Some((s, t)) = queue.pop_front() {
        for l in a.alphabet().iter() {
            let s2 = a.succ(s, l).expect("T_1 is complete");
            let t2 = b.succ(t, l)?;
            if bind(s2, t2, &mut fwd)? {
                queue.push_back((s2, t2));
            }
        }
    }
    for x in 1..a.depth() {
        for s in a.layer_states(x) {
            let t = *fwd.get(&s)?;
            let kids_b: Vec<StateId> = b.children(t).collect();
            for c in a.children(s) {
                let mut found = None;
                for &d in &kids_b {
                    if safe_included(a, c, b, d) && safe_included(b, d, a, c) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(d);
                    }
                }
                bind(c, found?, &mut fwd)?;
            }
        }
    }
    if fwd.len() != a.state_count() {
        return None;
    }
    let map: BTreeMap<StateId, StateId> = fwd.into_iter().collect();
    let m = LayeredMorphism { map, strong: true };
    let inverse = LayeredMorphism {
        map: m.map.iter().map(|(&s, &t)| (t, s)).collect(),
        strong: true,
    };
    if check_morphism(a, b, &m) && check_morphism(b, a, &inverse) {
        Some(m.map)
    } else {
        None
    }
}
