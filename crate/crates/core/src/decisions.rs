//! Consistency, emptiness and inclusion of layered automata, decided by Büchi and generalized
//! Büchi games.
//!
//! All games share one ingredient: a run in some layer `x` together with a tracked child run in
//! layer `x + 1`. The main run must never die (Prover loses otherwise). When the tracked run dies,
//! or no child is tracked yet, Refuter picks a fresh child of the current main state and the
//! move counts as a reset. Infinitely many resets mean that the word is not ultimately safe one
//! layer deeper; for a state without children every move is a reset.

use std::collections::HashMap;
use std::hash::Hash;

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::game::{solve_buchi, solve_generalized_buchi, Condition, GameArena, Player};
use crate::layered::{LayeredAutomaton, StateId};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Tracked {
    main: StateId,
    child: Option<usize>,
}

impl Tracked {
    fn start(main: StateId) -> Self {
        Tracked { main, child: None }
    }
}

/// Successor configurations of a tracked run on `l`, each flagged with whether it is a reset.
/// `None` when the main run dies.
fn tracked_options(a: &LayeredAutomaton, c: Tracked, l: Letter) -> Option<Vec<(Tracked, bool)>> {
    let main = a.succ(c.main, l)?;
    if let Some(t) = c.child {
        if let Some(t2) = a.succ(StateId::new(c.main.layer + 1, t), l) {
            return Some(vec![(
                Tracked {
                    main,
                    child: Some(t2.index),
                },
                false,
            )]);
        }
    }
    let kids: Vec<(Tracked, bool)> = a
        .children(main)
        .map(|k| {
            (
                Tracked {
                    main,
                    child: Some(k.index),
                },
                true,
            )
        })
        .collect();
    if kids.is_empty() {
        Some(vec![(Tracked { main, child: None }, true)])
    } else {
        Some(kids)
    }
}

/// Arena under construction with hash-consed Prover and Refuter positions.
struct Builder<P, R> {
    arena: GameArena,
    prover: HashMap<P, usize>,
    refuter: HashMap<R, usize>,
    todo_p: Vec<(P, usize)>,
    todo_r: Vec<(R, usize)>,
}

impl<P: Clone + Eq + Hash, R: Clone + Eq + Hash> Builder<P, R> {
    fn new(condition: Condition) -> Self {
        Builder {
            arena: GameArena::new(condition),
            prover: HashMap::new(),
            refuter: HashMap::new(),
            todo_p: Vec::new(),
            todo_r: Vec::new(),
        }
    }

    fn prover(&mut self, key: P) -> usize {
        if let Some(&v) = self.prover.get(&key) {
            return v;
        }
        let v = self.arena.add_vertex(Player::Prover);
        self.prover.insert(key.clone(), v);
        self.todo_p.push((key, v));
        v
    }

    fn refuter(&mut self, key: R) -> usize {
        if let Some(&v) = self.refuter.get(&key) {
            return v;
        }
        let v = self.arena.add_vertex(Player::Refuter);
        self.refuter.insert(key.clone(), v);
        self.todo_r.push((key, v));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Consistency {
    pub consistent: bool,
    /// The first pair `(p, p')` (even-layer `p`, odd-layer `p'`, same layer-1 ancestor) from
    /// which some word is strongly accepted by `p` and strongly rejected by `p'`.
    pub witness: Option<(StateId, StateId)>,
}

/// Decides consistency with a single generalized Büchi game covering all pairs `(p, p')` with
/// `p` on an even layer, `p'` on an odd layer and `μ̂_1(p) = μ̂_1(p')`. Prover chooses letters,
/// Refuter resolves resets in both components; Prover wins iff both components reset infinitely
/// often, which exhibits a word strongly accepted from `p` and strongly rejected from `p'`.
pub fn check_consistent(a: &LayeredAutomaton) -> Result<Consistency> {
    a.ensure_valid()?;
    let mut roots: HashMap<StateId, (Vec<StateId>, Vec<StateId>)> = HashMap::new();
    for s in a.states() {
        let entry = roots.entry(a.ancestor(s, 1)).or_default();
        if s.layer % 2 == 0 {
            entry.0.push(s);
        } else {
            entry.1.push(s);
        }
    }
    let mut pairs = Vec::new();
    for r in a.layer_states(1) {
        let (evens, odds) = &roots[&r];
        for &p in evens {
            for &q in odds {
                pairs.push((p, q));
            }
        }
    }
    pairs.sort();

    let mut b: Builder<(Tracked, Tracked), (Tracked, Tracked, Letter)> =
        Builder::new(Condition::GeneralizedBuchi(2));
    let starts: Vec<usize> = pairs
        .iter()
        .map(|&(p, q)| b.prover((Tracked::start(p), Tracked::start(q))))
        .collect();
    loop {
        if let Some(((c1, c2), v)) = b.todo_p.pop() {
            let mut moved = false;
            for l in a.alphabet().iter() {
                if a.succ(c1.main, l).is_some() && a.succ(c2.main, l).is_some() {
                    let r = b.refuter((c1, c2, l));
                    b.arena.add_edge(v, r, 0, 0);
                    moved = true;
                }
            }
            if !moved {
                b.arena.make_sink(v, Player::Refuter);
            }
        } else if let Some(((c1, c2, l), v)) = b.todo_r.pop() {
            let o1 = tracked_options(a, c1, l).expect("main run checked");
            let o2 = tracked_options(a, c2, l).expect("main run checked");
            for &(n1, r1) in &o1 {
                for &(n2, r2) in &o2 {
                    let w = b.prover((n1, n2));
                    let marks = (r1 as u64) | ((r2 as u64) << 1);
                    b.arena.add_edge(v, w, 0, marks);
                }
            }
        } else {
            break;
        }
    }
    let win = solve_generalized_buchi(&b.arena)?;
    let witness = pairs
        .iter()
        .zip(&starts)
        .find(|(_, &v)| win.prover_wins(v))
        .map(|(&pair, _)| pair);
    Ok(Consistency {
        consistent: witness.is_none(),
        witness,
    })
}

fn require_consistent(a: &LayeredAutomaton) -> Result<()> {
    let c = check_consistent(a)?;
    match c.witness {
        None => Ok(()),
        Some((p, q)) => Err(Error::precondition(
            "consistency",
            format!("({}, {})", a.name(p), a.name(q)),
        )),
    }
}

/// Language emptiness; the input must be consistent (checked).
pub fn is_empty(a: &LayeredAutomaton) -> Result<bool> {
    require_consistent(a)?;
    is_empty_unchecked(a)
}

/// Language emptiness without the consistency check. On inconsistent inputs the answer refers
/// to the layered acceptance condition only.
///
/// Büchi game from every even-layer state `p0`: the language is non-empty iff Prover can keep
/// the run from `p0` alive while forcing infinitely many resets one layer deeper.
pub fn is_empty_unchecked(a: &LayeredAutomaton) -> Result<bool> {
    a.ensure_valid()?;
    let mut b: Builder<Tracked, (Tracked, Letter)> = Builder::new(Condition::Buchi);
    let starts: Vec<usize> = a
        .states()
        .filter(|s| s.layer % 2 == 0)
        .map(|s| b.prover(Tracked::start(s)))
        .collect();
    loop {
        if let Some((c, v)) = b.todo_p.pop() {
            let mut moved = false;
            for l in a.alphabet().iter() {
                if a.succ(c.main, l).is_some() {
                    let r = b.refuter((c, l));
                    b.arena.add_edge(v, r, 0, 0);
                    moved = true;
                }
            }
            if !moved {
                b.arena.make_sink(v, Player::Refuter);
            }
        } else if let Some(((c, l), v)) = b.todo_r.pop() {
            for (n, reset) in tracked_options(a, c, l).expect("main run checked") {
                let w = b.prover(n);
                b.arena.add_edge(v, w, 0, reset as u64);
            }
        } else {
            break;
        }
    }
    let win = solve_buchi(&b.arena)?;
    Ok(!starts.iter().any(|&v| win.prover_wins(v)))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Side {
    /// Following the word in `T_1`, phase 2 not entered yet.
    Waiting(StateId),
    Committed(Tracked),
}

fn side_options(a: &LayeredAutomaton, s: Side, l: Letter) -> Option<Vec<(Side, bool)>> {
    match s {
        Side::Waiting(q) => Some(vec![(Side::Waiting(a.succ(q, l).expect("T_1 is complete")), false)]),
        Side::Committed(c) => Some(
            tracked_options(a, c, l)?
                .into_iter()
                .map(|(n, r)| (Side::Committed(n), r))
                .collect(),
        ),
    }
}

/// Solves the two-phase inclusion game of `a` against `b` from every start pair of layer-1
/// states. Prover wins from `(q, q')` iff some word is accepted from `q` in `a` and rejected
/// from `q'` in `b`.
///
/// Each side starts in phase 1, following the word in `T_1`. Prover may commit a side (without
/// reading a letter) to an even-layer state over the current `T_1` state of `a`, respectively an
/// odd-layer state over the current `T_1` state of `b`. Committed sides are tracked runs; Prover
/// wins iff both sides reset infinitely often, which requires both to be committed.
fn inclusion_game(a: &LayeredAutomaton, b: &LayeredAutomaton, starts: &[(StateId, StateId)]) -> Result<Vec<bool>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Domain("automata over different alphabets".into()));
    }
    let evens = |m: &LayeredAutomaton, q: StateId| -> Vec<StateId> {
        m.subtree(q).into_iter().filter(|s| s.layer % 2 == 0).collect()
    };
    let odds = |m: &LayeredAutomaton, q: StateId| -> Vec<StateId> {
        m.subtree(q).into_iter().filter(|s| s.layer % 2 == 1).collect()
    };
    let commit_a: Vec<Vec<StateId>> = a.layer_states(1).map(|q| evens(a, q)).collect();
    let commit_b: Vec<Vec<StateId>> = b.layer_states(1).map(|q| odds(b, q)).collect();

    let mut g: Builder<(Side, Side), (Side, Side, Letter)> = Builder::new(Condition::GeneralizedBuchi(2));
    let start_vertices: Vec<usize> = starts
        .iter()
        .map(|&(q, q2)| g.prover((Side::Waiting(q), Side::Waiting(q2))))
        .collect();
    loop {
        if let Some(((sa, sb), v)) = g.todo_p.pop() {
            if let Side::Waiting(q) = sa {
                for &p in &commit_a[q.index] {
                    let w = g.prover((Side::Committed(Tracked::start(p)), sb));
                    g.arena.add_edge(v, w, 0, 0);
                }
            }
            if let Side::Waiting(q) = sb {
                for &p in &commit_b[q.index] {
                    let w = g.prover((sa, Side::Committed(Tracked::start(p))));
                    g.arena.add_edge(v, w, 0, 0);
                }
            }
            for l in a.alphabet().iter() {
                let alive = |m: &LayeredAutomaton, s: Side| match s {
                    Side::Waiting(_) => true,
                    Side::Committed(c) => m.succ(c.main, l).is_some(),
                };
                if alive(a, sa) && alive(b, sb) {
                    let r = g.refuter((sa, sb, l));
                    g.arena.add_edge(v, r, 0, 0);
                }
            }
            if g.arena.out_edges(v).next().is_none() {
                g.arena.make_sink(v, Player::Refuter);
            }
        } else if let Some(((sa, sb, l), v)) = g.todo_r.pop() {
            let oa = side_options(a, sa, l).expect("checked alive");
            let ob = side_options(b, sb, l).expect("checked alive");
            for &(na, ra) in &oa {
                for &(nb, rb) in &ob {
                    let w = g.prover((na, nb));
                    g.arena.add_edge(v, w, 0, (ra as u64) | ((rb as u64) << 1));
                }
            }
        } else {
            break;
        }
    }
    let win = solve_generalized_buchi(&g.arena)?;
    Ok(start_vertices.iter().map(|&v| win.prover_wins(v)).collect())
}

/// `L(a) ⊆ L(b)`; both automata must be consistent (checked).
pub fn is_included(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Result<bool> {
    require_consistent(a)?;
    require_consistent(b)?;
    is_included_unchecked(a, b)
}

pub fn is_included_unchecked(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Result<bool> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    let win = inclusion_game(a, b, &[(a.initial(), b.initial())])?;
    Ok(!win[0])
}

pub fn is_equivalent(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Result<bool> {
    require_consistent(a)?;
    require_consistent(b)?;
    is_equivalent_unchecked(a, b)
}

pub fn is_equivalent_unchecked(a: &LayeredAutomaton, b: &LayeredAutomaton) -> Result<bool> {
    Ok(is_included_unchecked(a, b)? && is_included_unchecked(b, a)?)
}

/// `L(q1) = L(q2)` for layer-1 states of a consistent automaton, by re-rooting at both states
/// and comparing the two automata.
pub fn state_lang_equal(a: &LayeredAutomaton, q1: StateId, q2: StateId) -> Result<bool> {
    for q in [q1, q2] {
        if q.layer != 1 || !a.contains(q) {
            return Err(Error::Domain(format!("{q:?} is not a layer-1 state")));
        }
    }
    require_consistent(a)?;
    if q1 == q2 {
        return Ok(true);
    }
    is_equivalent_unchecked(&a.reroot(q1)?, &a.reroot(q2)?)
}

/// Partition of the layer-1 states by language, as a class id per layer-1 state (classes are
/// numbered by their least member). Computed with one inclusion game of `a` against itself
/// started from every pair; the input must be consistent (not checked here).
pub fn language_classes_unchecked(a: &LayeredAutomaton) -> Result<Vec<usize>> {
    let n = a.layer_len(1);
    let starts: Vec<(StateId, StateId)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (StateId::new(1, i), StateId::new(1, j))))
        .filter(|(p, q)| p != q)
        .collect();
    let differs = inclusion_game(a, a, &starts)?;
    let mut not_incl = vec![vec![false; n]; n];
    for (&(p, q), &d) in starts.iter().zip(&differs) {
        not_incl[p.index][q.index] = d;
    }
    let mut class = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = next;
        for j in i + 1..n {
            if class[j] == usize::MAX && !not_incl[i][j] && !not_incl[j][i] {
                class[j] = next;
            }
        }
        next += 1;
    }
    Ok(class)
}

pub fn language_classes(a: &LayeredAutomaton) -> Result<Vec<usize>> {
    require_consistent(a)?;
    language_classes_unchecked(a)
}
