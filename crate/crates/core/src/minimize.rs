//! The canonical-form pipeline: SCC separation and lowering (normal form), safe minimisation and
//! centralisation, together with the predicates they establish and central sequences.
//!
//! Inside every fixpoint the lowest layer is processed first and, within a layer, the least
//! state, so outputs are deterministic.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::alphabet::Letter;
use crate::decisions::{check_consistent, is_equivalent_unchecked, language_classes_unchecked};
use crate::error::{Error, Result};
use crate::graph::tarjan_scc;
use crate::layered::{LayeredAutomaton, LayeredBuilder, StateId};
use crate::morphism::LayeredMorphism;
use crate::semantics::safe_included;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageReport {
    pub stage: String,
    pub transitions_removed: usize,
    pub states_removed: usize,
    pub sccs_lowered: usize,
    pub classes_merged: usize,
    pub sccs_deleted: usize,
}

impl StageReport {
    fn new(stage: &str) -> Self {
        StageReport {
            stage: stage.to_string(),
            ..Default::default()
        }
    }

    fn absorb(&mut self, other: &StageReport) {
        self.transitions_removed += other.transitions_removed;
        self.states_removed += other.states_removed;
        self.sccs_lowered += other.sccs_lowered;
        self.classes_merged += other.classes_merged;
        self.sccs_deleted += other.sccs_deleted;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub normal: bool,
    pub safe_minimal: bool,
    pub centralised: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    /// In order: normalize, safeMinimize, centralize.
    pub stages: Vec<StageReport>,
    pub normal: bool,
    pub safe_minimal: bool,
    pub centralised: bool,
    pub consistent: bool,
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            writeln!(
                f,
                "{}: transitions removed {}, states removed {}, SCCs lowered {}, classes merged {}, SCCs deleted {}",
                s.stage, s.transitions_removed, s.states_removed, s.sccs_lowered, s.classes_merged, s.sccs_deleted
            )?;
        }
        write!(
            f,
            "normal {}, safe minimal {}, centralised {}, consistent {}",
            self.normal, self.safe_minimal, self.centralised, self.consistent
        )
    }
}

fn transition_count(a: &LayeredAutomaton) -> usize {
    a.states().map(|s| a.letters(s).len()).sum()
}

fn layer_succ(a: &LayeredAutomaton, x: usize) -> Vec<Vec<usize>> {
    a.layer_states(x)
        .map(|s| a.alphabet().iter().filter_map(|l| a.succ(s, l)).map(|t| t.index).collect())
        .collect()
}

/// SCC id of every state of `T_x`.
fn layer_sccs(a: &LayeredAutomaton, x: usize) -> Vec<usize> {
    tarjan_scc(&layer_succ(a, x)).0
}

fn require_consistent(a: &LayeredAutomaton) -> Result<()> {
    if let Some((p, q)) = check_consistent(a)?.witness {
        return Err(Error::precondition(
            "consistency",
            format!("({}, {})", a.name(p), a.name(q)),
        ));
    }
    Ok(())
}

fn require(holds: bool, property: &str) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(Error::precondition(property, "input"))
    }
}

// ---------------------------------------------------------------------------------------------
// Normal form

/// N1: on every layer `x ≥ 2` each state lies on a cycle and no transition leaves its SCC.
pub fn is_n1(a: &LayeredAutomaton) -> bool {
    (2..=a.depth()).all(|x| {
        let comp = layer_sccs(a, x);
        let mut on_cycle = vec![false; a.layer_len(x)];
        for s in a.layer_states(x) {
            for l in a.alphabet().iter() {
                if let Some(t) = a.succ(s, l) {
                    if comp[s.index] != comp[t.index] {
                        return false;
                    }
                    on_cycle[s.index] = true;
                }
            }
        }
        on_cycle.into_iter().all(|c| c)
    })
}

/// N2: on every layer `x ≥ 2` each child can die on some word safe for its parent.
pub fn is_n2(a: &LayeredAutomaton) -> bool {
    (2..a.depth()).all(|x| {
        a.layer_states(x)
            .all(|q| a.children(q).all(|p| !safe_included(a, q, a, p)))
    })
}

pub fn is_normal(a: &LayeredAutomaton) -> bool {
    is_n1(a) && is_n2(a)
}

/// Removes every transition of a layer `x ≥ 2` that changes SCC, together with all transitions
/// of higher layers mapped onto it, then prunes states of layers `≥ 2` left without outgoing
/// transitions. Repeats until nothing changes. The input must be consistent (checked).
pub fn separate_sccs(a: &LayeredAutomaton) -> Result<LayeredAutomaton> {
    require_consistent(a)?;
    Ok(separate_sccs_impl(a).0)
}

pub(crate) fn separate_sccs_impl(a: &LayeredAutomaton) -> (LayeredAutomaton, StageReport) {
    let mut report = StageReport::new("separate_sccs");
    let mut cur = a.clone();
    loop {
        let mut cut: HashSet<(StateId, Letter)> = HashSet::new();
        for x in 2..=cur.depth() {
            let comp = layer_sccs(&cur, x);
            for s in cur.layer_states(x) {
                for l in cur.alphabet().iter() {
                    if let Some(t) = cur.succ(s, l) {
                        if comp[s.index] != comp[t.index] {
                            cut.insert((s, l));
                        }
                    }
                }
            }
        }
        let cuts_edge = |s: StateId, l: Letter| (2..=s.layer).any(|x| cut.contains(&(cur.ancestor(s, x), l)));
        let before = (transition_count(&cur), cur.state_count());
        let mut next = cur.restrict(cur.initial(), |_| true, |s, l| !cuts_edge(s, l));
        // Prune states without outgoing transitions.
        loop {
            let dead: HashSet<StateId> = next
                .states()
                .filter(|&s| s.layer >= 2 && next.letters(s).is_empty())
                .collect();
            if dead.is_empty() {
                break;
            }
            next = next.restrict(next.initial(), |s| !dead.contains(&s), |_, _| true);
        }
        let after = (transition_count(&next), next.state_count());
        report.transitions_removed += before.0 - after.0;
        report.states_removed += before.1 - after.1;
        if after == before {
            return (next, report);
        }
        cur = next;
    }
}

/// A covered pair of SCCs: `S_x` on layer `x ≥ 2` and an SCC `S_{x+1}` of its children in
/// which every state can read every letter its parent can read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveredPair {
    pub x: usize,
    pub lower: Vec<StateId>,
    pub upper: Vec<StateId>,
}

/// The first covered pair, by layer, then least state of `S_x`, then least state of `S_{x+1}`.
/// Assumes N1.
pub fn find_covered(a: &LayeredAutomaton) -> Option<CoveredPair> {
    for x in 2..a.depth() {
        let comp_x = layer_sccs(a, x);
        let comp_up = layer_sccs(a, x + 1);
        let mut groups: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
        for s in a.layer_states(x + 1) {
            groups.entry(comp_up[s.index]).or_default().push(s);
        }
        let mut best: Option<CoveredPair> = None;
        for members in groups.values() {
            let covered = members.iter().all(|&p| {
                let q = a.parent(p).unwrap();
                a.letters(q).iter().all(|&l| a.succ(p, l).is_some())
            });
            if !covered {
                continue;
            }
            let root = a.parent(members[0]).unwrap();
            let lower: Vec<StateId> = a
                .layer_states(x)
                .filter(|s| comp_x[s.index] == comp_x[root.index])
                .collect();
            let cand = CoveredPair {
                x,
                lower,
                upper: members.clone(),
            };
            let key = |c: &CoveredPair| (c.lower[0], c.upper[0]);
            if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
                best = Some(cand);
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// The lowering of `S_x` by `S_{x+1}`: every layer `y ≥ x` loses the states above `S_x` (the
/// set `Z_y`) and receives the states of layer `y + 2` above `S_{x+1}`. Kept states keep their
/// parent, states moved from layer `y + 2 > x + 2` keep their old parent (now on layer `y - 1`),
/// and states landing on layer `x` get their old ancestor on layer `x - 1`.
pub fn lower_at(a: &LayeredAutomaton, pair: &CoveredPair) -> Result<LayeredAutomaton> {
    let x = pair.x;
    if x < 2 || x >= a.depth() {
        return Err(Error::Domain(format!("cannot lower at layer {x}")));
    }
    let lower: HashSet<StateId> = pair.lower.iter().copied().collect();
    let upper: HashSet<StateId> = pair.upper.iter().copied().collect();
    if pair.lower.iter().any(|s| s.layer != x) || pair.upper.iter().any(|s| s.layer != x + 1) {
        return Err(Error::Domain("covered pair on the wrong layers".into()));
    }
    let in_z = |s: StateId| s.layer >= x && lower.contains(&a.ancestor(s, x));
    let in_s = |s: StateId| s.layer > x && upper.contains(&a.ancestor(s, x + 1));
    let d = a.depth();
    // New position (layer, index) of every surviving state.
    let mut place: HashMap<StateId, StateId> = HashMap::new();
    let mut members: Vec<Vec<StateId>> = vec![Vec::new(); d + 1];
    for y in 1..=d {
        if y < x {
            members[y] = a.layer_states(y).collect();
        } else {
            members[y] = a.layer_states(y).filter(|&s| !in_z(s)).collect();
            if y + 2 <= d {
                members[y].extend(a.layer_states(y + 2).filter(|&s| in_s(s)));
            }
        }
    }
    for (y, ms) in members.iter().enumerate() {
        for (i, &s) in ms.iter().enumerate() {
            place.insert(s, StateId::new(y, i));
        }
    }
    let mut b = LayeredBuilder::new(a.alphabet().clone());
    for (y, ms) in members.iter().enumerate().skip(1) {
        for &s in ms {
            let parent = if y == 1 {
                None
            } else if s.layer == y {
                Some(a.parent(s).unwrap())
            } else if y == x {
                Some(a.ancestor(s, x - 1))
            } else {
                Some(a.parent(s).unwrap())
            };
            let parent_index = match parent {
                None => None,
                Some(p) => {
                    let np = place.get(&p).copied().ok_or_else(|| {
                        Error::Internal(format!("parent of `{}` lost while lowering", a.name(s)))
                    })?;
                    if np.layer != y - 1 {
                        return Err(Error::Internal(format!("parent of `{}` misplaced", a.name(s))));
                    }
                    Some(np.index)
                }
            };
            b.push_state(y, a.name(s).to_string(), parent_index);
        }
    }
    for (y, ms) in members.iter().enumerate().skip(1) {
        for &s in ms {
            let ns = place[&s];
            for l in a.alphabet().iter() {
                if let Some(t) = a.succ(s, l) {
                    match place.get(&t) {
                        Some(nt) if nt.layer == y => b.set_transition(ns, l, nt.index),
                        _ => {
                            return Err(Error::precondition(
                                "N1",
                                format!("transition `{}` -{}-> `{}`", a.name(s), a.alphabet().symbol(l), a.name(t)),
                            ))
                        }
                    }
                }
            }
        }
    }
    b.set_initial_index(a.initial().index);
    b.build()
}

/// Lowers covered SCCs until none is left. The input must be consistent and satisfy N1
/// (checked).
pub fn lower_covered(a: &LayeredAutomaton) -> Result<LayeredAutomaton> {
    require_consistent(a)?;
    require(is_n1(a), "N1")?;
    Ok(lower_covered_impl(a)?.0)
}

pub(crate) fn lower_covered_impl(a: &LayeredAutomaton) -> Result<(LayeredAutomaton, StageReport)> {
    let mut report = StageReport::new("lower_covered");
    let mut cur = a.clone();
    while let Some(pair) = find_covered(&cur) {
        let next = lower_at(&cur, &pair)?;
        report.sccs_lowered += 1;
        report.states_removed += cur.state_count() - next.state_count();
        report.transitions_removed += transition_count(&cur) - transition_count(&next);
        cur = next;
    }
    Ok((cur, report))
}

/// SCC separation, then lowering and separation alternately until both are stable. The input
/// must be consistent (checked).
pub fn normalize(a: &LayeredAutomaton) -> Result<LayeredAutomaton> {
    require_consistent(a)?;
    Ok(normalize_impl(a)?.0)
}

pub(crate) fn normalize_impl(a: &LayeredAutomaton) -> Result<(LayeredAutomaton, StageReport)> {
    let mut report = StageReport::new("normalize");
    let (mut cur, r) = separate_sccs_impl(a);
    report.absorb(&r);
    loop {
        let (lowered, r) = lower_covered_impl(&cur)?;
        report.absorb(&r);
        let (sep, r2) = separate_sccs_impl(&lowered);
        report.absorb(&r2);
        if r.sccs_lowered == 0 && r2 == StageReport::new("separate_sccs") {
            return Ok((sep, report));
        }
        cur = sep;
    }
}

// ---------------------------------------------------------------------------------------------
// Safe minimality

/// Classes of equal safe language on layer `x`: coarsest partition of `T_x` (as a partial
/// automaton) respecting the set of defined letters and successor classes.
pub(crate) fn safe_classes(a: &LayeredAutomaton, x: usize) -> Vec<usize> {
    let n = a.layer_len(x);
    let k = a.alphabet().len();
    let mut class: Vec<usize> = renumber(
        (0..n)
            .map(|i| {
                let s = StateId::new(x, i);
                (0..k).map(|l| a.succ(s, l).is_some() as usize).collect::<Vec<_>>()
            })
            .collect(),
    );
    loop {
        let keys: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let s = StateId::new(x, i);
                let mut key = vec![class[i]];
                key.extend((0..k).map(|l| a.succ(s, l).map_or(usize::MAX, |t| class[t.index])));
                key
            })
            .collect();
        let next = renumber(keys);
        let count = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        if count(&next) == count(&class) {
            return next;
        }
        class = next;
    }
}

/// Numbers distinct keys by first occurrence.
fn renumber<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let next = ids.len();
        out.push(*ids.entry(k).or_insert(next));
    }
    out
}

/// The relations `≈_x` as class ids per layer: `≈_1` is language equality of layer-1 states,
/// `≈_x` relates states with `≈_{x-1}`-related parents and equal `x`-safe languages. Assumes
/// consistency.
pub fn approx_classes(a: &LayeredAutomaton) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![language_classes_unchecked(a)?];
    for x in 2..=a.depth() {
        let safe = safe_classes(a, x);
        let below = &out[x - 2];
        let keys: Vec<(usize, usize)> = a
            .layer_states(x)
            .map(|s| (below[a.parent(s).unwrap().index], safe[s.index]))
            .collect();
        out.push(renumber(keys));
    }
    Ok(out)
}

/// Safe minimality: `≈_x` is the identity on every layer. Assumes consistency.
pub fn is_safe_minimal(a: &LayeredAutomaton) -> Result<bool> {
    Ok(approx_classes(a)?
        .iter()
        .all(|c| c.iter().collect::<HashSet<_>>().len() == c.len()))
}

/// Quotient by `≈_x` on every layer, with the quotient map as a strong surjective morphism.
/// Each class keeps the name of its least member. The input must be consistent and normal
/// (checked).
pub fn safe_minimize(a: &LayeredAutomaton) -> Result<(LayeredAutomaton, LayeredMorphism)> {
    require_consistent(a)?;
    require(is_normal(a), "normal form")?;
    let (m, map, _) = safe_minimize_impl(a)?;
    Ok((m, map))
}

pub(crate) fn safe_minimize_impl(a: &LayeredAutomaton) -> Result<(LayeredAutomaton, LayeredMorphism, StageReport)> {
    let mut report = StageReport::new("safe_minimize");
    let classes = approx_classes(a)?;
    let mut b = LayeredBuilder::new(a.alphabet().clone());
    // Representative (least member) of every class, per layer.
    let mut reps: Vec<Vec<StateId>> = Vec::new();
    for x in 1..=a.depth() {
        let c = &classes[x - 1];
        let count = c.iter().max().map_or(0, |m| m + 1);
        let mut rep: Vec<Option<StateId>> = vec![None; count];
        for s in a.layer_states(x) {
            rep[c[s.index]].get_or_insert(s);
        }
        let rep: Vec<StateId> = rep.into_iter().map(|r| r.unwrap()).collect();
        for &r in &rep {
            let parent = a.parent(r).map(|p| classes[x - 2][p.index]);
            b.push_state(x, a.name(r).to_string(), parent);
        }
        reps.push(rep);
    }
    for x in 1..=a.depth() {
        let c = &classes[x - 1];
        for s in a.layer_states(x) {
            let cs = StateId::new(x, c[s.index]);
            for l in a.alphabet().iter() {
                let t = a.succ(s, l).map(|t| c[t.index]);
                let rep_t = a.succ(reps[x - 1][cs.index], l).map(|t| c[t.index]);
                if t != rep_t {
                    return Err(Error::Internal(format!(
                        "safe equivalence is not a bisimulation at `{}`",
                        a.name(s)
                    )));
                }
                if let Some(t) = t {
                    b.set_transition(cs, l, t);
                }
            }
            if let Some(p) = a.parent(s) {
                if classes[x - 2][p.index] != classes[x - 2][a.parent(reps[x - 1][cs.index]).unwrap().index] {
                    return Err(Error::Internal("safe equivalence does not respect parents".into()));
                }
            }
        }
    }
    b.set_initial_index(classes[0][a.initial().index]);
    let out = b.build()?;
    let map = a
        .states()
        .map(|s| (s, StateId::new(s.layer, classes[s.layer - 1][s.index])))
        .collect();
    report.classes_merged = a.state_count() - out.state_count();
    report.states_removed = report.classes_merged;
    report.transitions_removed = transition_count(a) - transition_count(&out);
    Ok((out, LayeredMorphism { map, strong: true }, report))
}

// ---------------------------------------------------------------------------------------------
// Centralisation

/// `incl[p][q]` iff `Lsafe_x(p) ⊆ Lsafe_x(q)` for states of layer `x`, as the greatest
/// relation closed under successors.
pub(crate) fn safe_inclusion(a: &LayeredAutomaton, x: usize) -> Vec<Vec<bool>> {
    let n = a.layer_len(x);
    let st = |i: usize| StateId::new(x, i);
    let mut incl: Vec<Vec<bool>> = (0..n)
        .map(|p| {
            (0..n)
                .map(|q| a.letters(st(p)).iter().all(|&l| a.succ(st(q), l).is_some()))
                .collect()
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..n {
            for q in 0..n {
                if !incl[p][q] {
                    continue;
                }
                let ok = a.alphabet().iter().all(|l| match a.succ(st(p), l) {
                    None => true,
                    Some(p2) => incl[p2.index][a.succ(st(q), l).unwrap().index],
                });
                if !ok {
                    incl[p][q] = false;
                    changed = true;
                }
            }
        }
    }
    incl
}

/// `p ⊑_x q`: same parent and included safe languages.
fn below_in(a: &LayeredAutomaton, incl: &[Vec<bool>], p: StateId, q: StateId) -> bool {
    a.parent(p) == a.parent(q) && incl[p.index][q.index]
}

pub fn is_centralised(a: &LayeredAutomaton) -> bool {
    (2..=a.depth()).all(|x| {
        let comp = layer_sccs(a, x);
        let incl = safe_inclusion(a, x);
        a.layer_states(x).all(|p| {
            a.layer_states(x)
                .all(|q| !below_in(a, &incl, p, q) || comp[p.index] == comp[q.index])
        })
    })
}

/// Deletes, while possible, the SCC of a state `p` on a layer `x ≥ 2` with `p ⊑_x q` for some
/// `q` in another SCC, together with everything above it. The input must be consistent, normal
/// and safe minimal (checked).
pub fn centralize(a: &LayeredAutomaton) -> Result<LayeredAutomaton> {
    require_consistent(a)?;
    require(is_normal(a), "normal form")?;
    require(is_safe_minimal(a)?, "safe minimality")?;
    Ok(centralize_impl(a).0)
}

pub(crate) fn centralize_impl(a: &LayeredAutomaton) -> (LayeredAutomaton, StageReport) {
    let mut report = StageReport::new("centralize");
    let mut cur = a.clone();
    'outer: loop {
        for x in 2..=cur.depth() {
            let comp = layer_sccs(&cur, x);
            let incl = safe_inclusion(&cur, x);
            for p in cur.layer_states(x) {
                let dominated = cur
                    .layer_states(x)
                    .any(|q| comp[q.index] != comp[p.index] && below_in(&cur, &incl, p, q));
                if dominated {
                    let doomed = comp[p.index];
                    let next = cur.restrict(
                        cur.initial(),
                        |s| s.layer < x || comp[cur.ancestor(s, x).index] != doomed,
                        |_, _| true,
                    );
                    report.sccs_deleted += 1;
                    report.states_removed += cur.state_count() - next.state_count();
                    report.transitions_removed += transition_count(&cur) - transition_count(&next);
                    cur = next;
                    continue 'outer;
                }
            }
        }
        return (cur, report);
    }
}

/// The three minimality predicates. The input must be consistent (checked).
pub fn predicates(a: &LayeredAutomaton) -> Result<Predicates> {
    require_consistent(a)?;
    predicates_unchecked(a)
}

pub fn predicates_unchecked(a: &LayeredAutomaton) -> Result<Predicates> {
    Ok(Predicates {
        normal: is_normal(a),
        safe_minimal: is_safe_minimal(a)?,
        centralised: is_centralised(a),
    })
}

/// Normalisation, safe minimisation and centralisation, followed by a re-check of all
/// predicates, consistency and equivalence with the input.
pub fn canonicalize(a: &LayeredAutomaton) -> Result<(LayeredAutomaton, PipelineReport)> {
    require_consistent(a)?;
    let (n, r1) = normalize_impl(a)?;
    let (s, _, r2) = safe_minimize_impl(&n)?;
    let (c, r3) = centralize_impl(&s);
    let p = predicates_unchecked(&c)?;
    let consistent = check_consistent(&c)?.consistent;
    let report = PipelineReport {
        stages: vec![r1, r2, r3],
        normal: p.normal,
        safe_minimal: p.safe_minimal,
        centralised: p.centralised,
        consistent,
    };
    if !(p.normal && p.safe_minimal && p.centralised && consistent) {
        return Err(Error::Internal(format!("pipeline postcondition failed: {report}")));
    }
    if !is_equivalent_unchecked(a, &c)? {
        return Err(Error::Internal("pipeline changed the language".into()));
    }
    Ok((c, report))
}

// ---------------------------------------------------------------------------------------------
// Central sequences

/// Shortest word (letters in alphabet order) leading from `s` to `t` inside their layer.
fn path(a: &LayeredAutomaton, s: StateId, t: StateId) -> Option<Vec<Letter>> {
    let mut prev: HashMap<StateId, (StateId, Letter)> = HashMap::new();
    let mut queue = VecDeque::from([s]);
    let mut seen = HashSet::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            let mut word = Vec::new();
            let mut cur = t;
            while cur != s {
                let (p, l) = prev[&cur];
                word.push(l);
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for l in a.alphabet().iter() {
            if let Some(v) = a.succ(u, l) {
                if seen.insert(v) {
                    prev.insert(v, (u, l));
                    queue.push_back(v);
                }
            }
        }
    }
    None
}

/// Shortest word readable from `s` on which the run from `t` (possibly on another layer) dies.
fn killing_word(a: &LayeredAutomaton, s: StateId, t: StateId) -> Option<(Vec<Letter>, StateId)> {
    let mut prev: HashMap<(StateId, StateId), ((StateId, StateId), Letter)> = HashMap::new();
    let mut queue = VecDeque::from([(s, t)]);
    let mut seen = HashSet::from([(s, t)]);
    let rebuild = |prev: &HashMap<(StateId, StateId), ((StateId, StateId), Letter)>, mut cur: (StateId, StateId)| {
        let mut word = Vec::new();
        while cur != (s, t) {
            let (p, l) = prev[&cur];
            word.push(l);
            cur = p;
        }
        word.reverse();
        word
    };
    while let Some((u, v)) = queue.pop_front() {
        for l in a.alphabet().iter() {
            let Some(u2) = a.succ(u, l) else { continue };
            match a.succ(v, l) {
                None => {
                    let mut word = rebuild(&prev, (u, v));
                    word.push(l);
                    return Some((word, u2));
                }
                Some(v2) => {
                    if seen.insert((u2, v2)) {
                        prev.insert((u2, v2), ((u, v), l));
                        queue.push_back((u2, v2));
                    }
                }
            }
        }
    }
    None
}

/// Checks the three clauses: `p` loops on `z`; every state of `p`'s layer with the same parent
/// reaches `p` on `z` or dies; every state one layer above with the same ancestor on layer
/// `x - 1` dies.
pub fn verify_central_sequence(a: &LayeredAutomaton, p: StateId, z: &[Letter]) -> bool {
    let x = p.layer;
    if x < 2 || !a.contains(p) || z.is_empty() {
        return false;
    }
    let r = a.parent(p).unwrap();
    if a.run(p, z) != Some(p) {
        return false;
    }
    let siblings_ok = a
        .layer_states(x)
        .filter(|&q| a.parent(q) == Some(r))
        .all(|q| a.run(q, z).is_none() || a.run(q, z) == Some(p));
    let above_ok = x == a.depth()
        || a
            .layer_states(x + 1)
            .filter(|&q| a.ancestor(q, x - 1) == r)
            .all(|q| a.run(q, z).is_none());
    siblings_ok && above_ok
}

/// A central sequence for `p` (layer `x ≥ 2`). The input must be consistent, normal,
/// centralised and safe minimal (checked); the result is verified before it is returned.
pub fn central_sequence(a: &LayeredAutomaton, p: StateId) -> Result<Vec<Letter>> {
    require_consistent(a)?;
    let pr = predicates_unchecked(a)?;
    require(pr.normal, "normal form")?;
    require(pr.safe_minimal, "safe minimality")?;
    require(pr.centralised, "centrality")?;
    central_sequence_unchecked(a, p)
}

pub fn central_sequence_unchecked(a: &LayeredAutomaton, p: StateId) -> Result<Vec<Letter>> {
    if p.layer < 2 || !a.contains(p) {
        return Err(Error::Domain("central sequences exist for states of layers ≥ 2".into()));
    }
    let x = p.layer;
    let incl = safe_inclusion(a, x);
    let siblings: Vec<StateId> = a.layer_states(x).filter(|&q| a.parent(q) == a.parent(p)).collect();
    let maximal = |q: StateId| siblings.iter().all(|&o| o == q || !incl[q.index][o.index]);
    let z = if maximal(p) {
        central_for_maximal(a, p, &siblings)?
    } else {
        let top = siblings
            .iter()
            .copied()
            .find(|&q| q != p && incl[p.index][q.index] && maximal(q))
            .ok_or_else(|| Error::Internal("no maximal state above".into()))?;
        let there = path(a, p, top).ok_or_else(|| Error::precondition("centrality", a.name(p).to_string()))?;
        let back = path(a, top, p).ok_or_else(|| Error::precondition("centrality", a.name(p).to_string()))?;
        let mid = central_for_maximal(a, top, &siblings)?;
        [there, mid, back].concat()
    };
    if !verify_central_sequence(a, p, &z) {
        return Err(Error::Internal(format!(
            "constructed word is not a central sequence for `{}`",
            a.name(p)
        )));
    }
    Ok(z)
}

fn central_for_maximal(a: &LayeredAutomaton, p: StateId, siblings: &[StateId]) -> Result<Vec<Letter>> {
    let fail = |what: &str| Error::Internal(format!("{what} for `{}`", a.name(p)));
    let mut z: Vec<Letter> = Vec::new();
    // Funnel every sibling into `p` or kill it.
    for &q in siblings {
        if let Some(cur) = a.run(q, &z) {
            if cur != p {
                let (v, end) = killing_word(a, p, cur).ok_or_else(|| fail("no separating word"))?;
                let back = path(a, end, p).ok_or_else(|| fail("no return path"))?;
                z.extend(v);
                z.extend(back);
            }
        }
    }
    // Then a loop on `p` killing every child of `p`; states above the siblings that survived
    // the funnel sit below `p` by now.
    let mut kill: Vec<Letter> = Vec::new();
    let children: Vec<StateId> = a.children(p).collect();
    for c in children {
        if let Some(cur) = a.run(c, &kill) {
            let (v, end) = killing_word(a, p, cur).ok_or_else(|| fail("no word killing a child"))?;
            let back = path(a, end, p).ok_or_else(|| fail("no return path"))?;
            kill.extend(v);
            kill.extend(back);
        }
    }
    z.extend(kill);
    if z.is_empty() {
        // nothing to funnel or kill; any cycle through `p` will do
        z = a
            .alphabet()
            .iter()
            .filter_map(|l| a.succ(p, l).and_then(|t| path(a, t, p)).map(|w| [vec![l], w].concat()))
            .min_by_key(Vec::len)
            .ok_or_else(|| fail("no cycle"))?;
    }
    Ok(z)
}
