//! The semantics automaton `sem(A)`, safe languages, strong acceptance and exact membership of
//! ultimately periodic words.

use std::collections::{HashMap, HashSet};

use crate::alphabet::Letter;
use crate::alternating::AlternatingAutomaton;
use crate::error::{Error, Result};
use crate::game::{solve_parity, Condition, GameArena, Player};
use crate::layered::{LayeredAutomaton, StateId};
use crate::word::UpWord;

/// Leaves of `a` in global order; index `i` of `sem(a)` is `sem_states(a)[i]`.
pub fn sem_states(a: &LayeredAutomaton) -> Vec<StateId> {
    a.leaves()
}

/// Leaves `q` with `μ̂_1(q)` equal to the initial state, in global order.
pub fn admissible_initial_leaves(a: &LayeredAutomaton) -> Vec<StateId> {
    a.leaves_under(a.initial())
}

/// The semantics automaton: states are the leaves; from `q` on `a` with `x = llayer(q, a)` there
/// is a priority-`x` transition to every leaf below `δ_x(μ̂_x(q), a)`.
///
/// The initial state is `initial_leaf`, or the least admissible leaf.
pub fn build_sem(a: &LayeredAutomaton, initial_leaf: Option<StateId>) -> Result<AlternatingAutomaton> {
    let leaves = sem_states(a);
    let pos: HashMap<StateId, usize> = leaves.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let admissible = admissible_initial_leaves(a);
    let init = match initial_leaf {
        Some(q) => {
            if !admissible.contains(&q) {
                return Err(Error::Domain(format!(
                    "`{}` is not a leaf below the initial state",
                    if a.contains(q) { a.name(q) } else { "?" }
                )));
            }
            q
        }
        None => admissible[0],
    };
    let names = leaves.iter().map(|&q| a.name(q).to_string()).collect();
    let mut b = AlternatingAutomaton::new(a.alphabet().clone(), names, pos[&init])?;
    let mut under: HashMap<StateId, Vec<StateId>> = HashMap::new();
    for (i, &q) in leaves.iter().enumerate() {
        for l in a.alphabet().iter() {
            let x = a.action_layer(q, l);
            let target = a.succ(a.ancestor(q, x), l).expect("T_1 is complete");
            let targets = under.entry(target).or_insert_with(|| a.leaves_under(target));
            for t in targets.iter() {
                b.add_transition(i, l, x as u32, pos[t]);
            }
        }
    }
    Ok(b)
}

/// End state of the `T_x`-run on `w` from `μ̂_x(q)`, if the run does not die.
pub fn run_safe(a: &LayeredAutomaton, x: usize, q: StateId, w: &[Letter]) -> Result<Option<StateId>> {
    let s = a.ancestor_at(q, x)?;
    Ok(a.run(s, w))
}

/// Whether the run of `w` from canonical position `pos`, started in `s` inside its own layer,
/// never dies.
pub(crate) fn safe_from(a: &LayeredAutomaton, s: StateId, w: &UpWord, pos: usize) -> bool {
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let (mut cur, mut p) = (s, pos);
    while seen.insert((cur.index, p)) {
        match a.succ(cur, w.letter_at(p)) {
            Some(t) => cur = t,
            None => return false,
        }
        p = w.next(p);
    }
    true
}

/// The distinct `(state, position)` pairs visited by the run of `w` from `s` starting at
/// canonical position `pos`, in order, up to the first repetition or the death of the run.
pub(crate) fn run_pairs(a: &LayeredAutomaton, s: StateId, w: &UpWord, pos: usize) -> Vec<(StateId, usize)> {
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    let (mut cur, mut p) = (s, pos);
    while seen.insert((cur.index, p)) {
        out.push((cur, p));
        match a.succ(cur, w.letter_at(p)) {
            Some(t) => cur = t,
            None => break,
        }
        p = w.next(p);
    }
    out
}

/// `u·v^ω ∈ Lsafe_x(q)`.
pub fn safe_member_up(a: &LayeredAutomaton, x: usize, q: StateId, w: &UpWord) -> Result<bool> {
    w.check_alphabet(a.alphabet().len())?;
    let s = a.ancestor_at(q, x)?;
    Ok(safe_from(a, s, w, 0))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SafeMode {
    Equal,
    Included,
}

/// Compares `Lsafe_x(p)` with `Lsafe_x(q)`.
pub fn safe_compare(a: &LayeredAutomaton, x: usize, p: StateId, q: StateId, mode: SafeMode) -> Result<bool> {
    let s = a.ancestor_at(p, x)?;
    let t = a.ancestor_at(q, x)?;
    Ok(match mode {
        SafeMode::Included => safe_included(a, s, a, t),
        SafeMode::Equal => safe_included(a, s, a, t) && safe_included(a, t, a, s),
    })
}

/// Whether every finite word that can be read from `s` (in its layer of `a`) can also be read
/// from `t` (in its layer of `b`). The alphabets must coincide.
pub fn safe_included(a: &LayeredAutomaton, s: StateId, b: &LayeredAutomaton, t: StateId) -> bool {
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut todo = vec![(s, t)];
    seen.insert((s.index, t.index));
    while let Some((u, v)) = todo.pop() {
        for l in a.alphabet().iter() {
            if let Some(u2) = a.succ(u, l) {
                let Some(v2) = b.succ(v, l) else { return false };
                if seen.insert((u2.index, v2.index)) {
                    todo.push((u2, v2));
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StrongStatus {
    StronglyAccepted,
    StronglyRejected,
    Neither,
}

/// Strong acceptance (even layer) or rejection (odd layer) of `w` by `p`: `w` is safe from `p`
/// in its layer, and no decomposition `w = u'w'` leads from `p` to a state having a child from
/// which `w'` is safe one layer deeper.
pub fn strong_status_up(a: &LayeredAutomaton, p: StateId, w: &UpWord) -> Result<StrongStatus> {
    w.check_alphabet(a.alphabet().len())?;
    if !a.contains(p) {
        return Err(Error::Domain(format!("{p:?} is not a state")));
    }
    Ok(strong_status_at(a, p, w, 0))
}

pub(crate) fn strong_status_at(a: &LayeredAutomaton, p: StateId, w: &UpWord, pos: usize) -> StrongStatus {
    if !safe_from(a, p, w, pos) {
        return StrongStatus::Neither;
    }
    for (s, i) in run_pairs(a, p, w, pos) {
        if a.children(s).any(|c| safe_from(a, c, w, i)) {
            return StrongStatus::Neither;
        }
    }
    if p.layer.is_multiple_of(2) {
        StrongStatus::StronglyAccepted
    } else {
        StrongStatus::StronglyRejected
    }
}

/// Acceptance by the layered condition: `w` is accepted iff the largest layer in which it is
/// ultimately safe is even. Returns the verdict and that layer.
///
/// Every decomposition point is represented by a distinct `(T_1 state, position)` pair of the
/// `T_1`-run; for each, the states below the reached `T_1` state are searched top-down (a state
/// can only be safe if its parent is).
pub fn layered_accept_up(a: &LayeredAutomaton, w: &UpWord) -> Result<(bool, usize)> {
    w.check_alphabet(a.alphabet().len())?;
    let mut best = 1;
    for (s1, pos) in run_pairs(a, a.initial(), w, 0) {
        let mut frontier = vec![s1];
        while let Some(s) = frontier.pop() {
            best = best.max(s.layer);
            for c in a.children(s) {
                if safe_from(a, c, w, pos) {
                    frontier.push(c);
                }
            }
        }
    }
    Ok((best % 2 == 0, best))
}

/// Whether some suffix of `w`, reached at a point where the `T_1`-run is in `μ̂_1(p)`, is
/// strongly accepted (`want = StronglyAccepted`) or strongly rejected by some such `p`.
pub fn exists_strong_suffix(a: &LayeredAutomaton, w: &UpWord, want: StrongStatus) -> Result<bool> {
    w.check_alphabet(a.alphabet().len())?;
    for (s1, pos) in run_pairs(a, a.initial(), w, 0) {
        for p in a.subtree(s1) {
            if strong_status_at(a, p, w, pos) == want {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Exact membership of `w` in the language of the alternating automaton `b` (from `from`, or
/// the initial state), by solving the acceptance parity game on `(state, position)` pairs.
pub fn alt_member_up(b: &AlternatingAutomaton, w: &UpWord, from: Option<usize>) -> Result<bool> {
    w.check_alphabet(b.alphabet().len())?;
    let start = from.unwrap_or(b.initial());
    if start >= b.len() {
        return Err(Error::Domain("start state out of range".into()));
    }
    let mut g = GameArena::new(Condition::Parity);
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut todo = vec![(start, 0usize)];
    let mut order = Vec::new();
    while let Some((q, pos)) = todo.pop() {
        if index.contains_key(&(q, pos)) {
            continue;
        }
        let (p, targets) = b
            .action(q, w.letter_at(pos))
            .ok_or_else(|| Error::precondition("simple by priorities", b.name(q).to_string()))?;
        let owner = if p % 2 == 1 { Player::Prover } else { Player::Refuter };
        index.insert((q, pos), g.add_vertex(owner));
        order.push((q, pos, p, targets.clone()));
        let next = w.next(pos);
        for t in targets {
            todo.push((t, next));
        }
    }
    for (q, pos, p, targets) in order {
        let v = index[&(q, pos)];
        let next = w.next(pos);
        for t in targets {
            g.add_edge(v, index[&(t, next)], p, 0);
        }
    }
    let win = solve_parity(&g)?;
    Ok(win.prover_wins(index[&(start, 0)]))
}

/// One coBüchi automaton per layer: `δ_x` transitions get priority 2, and an undefined `(q, a)`
/// gets priority-1 transitions to every `x`-state over the `T_1`-successor of `μ̂_1(q)`. When
/// some residual has no `x`-state, a rejecting sink `⊥` stands in for the missing states.
pub fn cocoa_export(a: &LayeredAutomaton) -> Result<Vec<AlternatingAutomaton>> {
    if let Some((p, q)) = crate::decisions::check_consistent(a)?.witness {
        return Err(Error::precondition(
            "consistency",
            format!("({}, {})", a.name(p), a.name(q)),
        ));
    }
    let sigma = a.alphabet();
    let mut out = Vec::with_capacity(a.depth());
    for x in 1..=a.depth() {
        let states: Vec<StateId> = a.layer_states(x).collect();
        let mut over: HashMap<StateId, Vec<usize>> = HashMap::new();
        for (i, &s) in states.iter().enumerate() {
            over.entry(a.ancestor(s, 1)).or_default().push(i);
        }
        let needs_sink = a.layer_states(1).any(|r| !over.contains_key(&r));
        let mut names: Vec<String> = states.iter().map(|&s| a.name(s).to_string()).collect();
        let sink = needs_sink.then(|| {
            names.push("⊥".to_string());
            names.len() - 1
        });
        let init = over
            .get(&a.initial())
            .map(|v| v[0])
            .or(sink)
            .expect("sink exists when the initial residual has no state");
        let mut b = AlternatingAutomaton::new(sigma.clone(), names, init)?;
        for (i, &s) in states.iter().enumerate() {
            for l in sigma.iter() {
                match a.succ(s, l) {
                    Some(t) => b.add_transition(i, l, 2, t.index),
                    None => {
                        let r = a.succ(a.ancestor(s, 1), l).expect("T_1 is complete");
                        match over.get(&r) {
                            Some(ts) => {
                                for &t in ts {
                                    b.add_transition(i, l, 1, t);
                                }
                            }
                            None => b.add_transition(i, l, 1, sink.unwrap()),
                        }
                    }
                }
            }
        }
        if let Some(k) = sink {
            for l in sigma.iter() {
                b.add_transition(k, l, 1, k);
            }
        }
        out.push(b);
    }
    Ok(out)
}
