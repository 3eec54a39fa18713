use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, LayeredBuilder, StateId};

/// Alternating parity automaton given by its transitions `(q, a, priority, q')`.
///
/// The priority of a transition decides who picks it: Eve resolves the choice among the
/// `a`-transitions of `q` when their priority is odd, Adam when it is even. Only automata that
/// are simple by priorities (all `a`-transitions of `q` share one priority) have a well defined
/// owner per action; see [`AlternatingAutomaton::check_simple`].
#[derive(Clone, PartialEq, Eq)]
pub struct AlternatingAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    /// `moves[q][a]`: sorted, duplicate-free `(priority, target)` pairs
    moves: Vec<Vec<Vec<(u32, usize)>>>,
}

impl AlternatingAutomaton {
    pub fn new(alphabet: Alphabet, names: Vec<String>, initial: usize) -> Result<Self> {
        if initial >= names.len() {
            return Err(Error::Domain("initial state out of range".into()));
        }
        let mut seen = HashMap::new();
        for name in &names {
            if seen.insert(name.clone(), ()).is_some() {
                return Err(Error::Domain(format!("duplicate state id `{name}`")));
            }
        }
        let moves = vec![vec![Vec::new(); alphabet.len()]; names.len()];
        Ok(AlternatingAutomaton {
            alphabet,
            names,
            initial,
            moves,
        })
    }

    pub fn add_transition(&mut self, q: usize, a: Letter, priority: u32, target: usize) {
        let row = &mut self.moves[q][a];
        if let Err(pos) = row.binary_search(&(priority, target)) {
            row.insert(pos, (priority, target));
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn with_initial(&self, q: usize) -> AlternatingAutomaton {
        AlternatingAutomaton {
            initial: q,
            ..self.clone()
        }
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The `(priority, target)` pairs of `q` on `a`.
    pub fn moves(&self, q: usize, a: Letter) -> &[(u32, usize)] {
        &self.moves[q][a]
    }

    /// Priority and targets of action `a` in `q`, if all `a`-transitions share one priority.
    pub fn action(&self, q: usize, a: Letter) -> Option<(u32, Vec<usize>)> {
        let row = &self.moves[q][a];
        let p = row.first()?.0;
        if row.iter().any(|&(p2, _)| p2 != p) {
            return None;
        }
        Some((p, row.iter().map(|&(_, t)| t).collect()))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Letter, u32, usize)> + '_ {
        self.moves.iter().enumerate().flat_map(|(q, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(a, row)| row.iter().map(move |&(p, t)| (q, a, p, t)))
        })
    }

    pub fn max_priority(&self) -> u32 {
        self.transitions().map(|(_, _, p, _)| p).max().unwrap_or(0)
    }

    /// Checks completeness and simplicity by priorities.
    pub fn check_simple(&self) -> Result<()> {
        for q in 0..self.len() {
            for a in self.alphabet.iter() {
                let row = &self.moves[q][a];
                if row.is_empty() {
                    return Err(Error::precondition(
                        "completeness",
                        format!("({}, {})", self.names[q], self.alphabet.symbol(a)),
                    ));
                }
                if self.action(q, a).is_none() {
                    return Err(Error::precondition(
                        "simple by priorities",
                        format!("({}, {})", self.names[q], self.alphabet.symbol(a)),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Same state names, same initial state name, same transition set (compared by names).
    pub fn structurally_equal(&self, other: &AlternatingAutomaton) -> bool {
        if self.alphabet != other.alphabet || self.len() != other.len() {
            return false;
        }
        let mine: BTreeSet<&str> = self.names.iter().map(String::as_str).collect();
        let theirs: BTreeSet<&str> = other.names.iter().map(String::as_str).collect();
        if mine != theirs || self.names[self.initial] != other.names[other.initial] {
            return false;
        }
        let named = |m: &AlternatingAutomaton| -> BTreeSet<(String, Letter, u32, String)> {
            m.transitions()
                .map(|(q, a, p, t)| (m.names[q].clone(), a, p, m.names[t].clone()))
                .collect()
        };
        named(self) == named(other)
    }

    /// True when every action has a single successor.
    pub fn is_deterministic(&self) -> bool {
        self.moves.iter().all(|rows| rows.iter().all(|row| row.len() <= 1))
    }

    /// Restriction to the given states (transitions leaving the set are dropped).
    pub(crate) fn restrict(&self, keep: &[bool]) -> AlternatingAutomaton {
        let mut pos = vec![usize::MAX; self.len()];
        let mut names = Vec::new();
        for q in 0..self.len() {
            if keep[q] {
                pos[q] = names.len();
                names.push(self.names[q].clone());
            }
        }
        let mut out = AlternatingAutomaton::new(self.alphabet.clone(), names, pos[self.initial])
            .expect("restriction keeps the initial state");
        for (q, a, p, t) in self.transitions() {
            if keep[q] && keep[t] {
                out.add_transition(pos[q], a, p, pos[t]);
            }
        }
        out
    }
}

impl fmt::Debug for AlternatingAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AlternatingAutomaton over {:?}, initial {}", self.alphabet, self.names[self.initial])?;
        for (q, a, p, t) in self.transitions() {
            writeln!(f, "  {} --{}:{}--> {}", self.names[q], self.alphabet.symbol(a), p, self.names[t])?;
        }
        Ok(())
    }
}

/// Nested partial equivalence relations `∼_1 ⊇ ∼_2 ⊇ ... ⊇ ∼_d` over the states of an
/// alternating automaton, given as a class id per state and level (`None` when the state is
/// outside the domain of that level).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedRelations {
    levels: Vec<Vec<Option<usize>>>,
}

impl NestedRelations {
    pub fn new(levels: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("at least one relation is needed".into()));
        }
        let n = levels[0].len();
        if levels.iter().any(|l| l.len() != n) {
            return Err(Error::Domain("relations over different state sets".into()));
        }
        for x in 1..levels.len() {
            let mut up: HashMap<usize, Option<usize>> = HashMap::new();
            for q in 0..n {
                let Some(c) = levels[x][q] else { continue };
                let below = levels[x - 1][q];
                if below.is_none() {
                    return Err(Error::Domain(format!("nesting: state {q} is related at level {} only", x + 1)));
                }
                match up.insert(c, below) {
                    Some(prev) if prev != below => {
                        return Err(Error::Domain(format!(
                            "nesting: a class of level {} spans two classes of level {x}",
                            x + 1
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(NestedRelations { levels })
    }

    /// The relations `q ∼_x p` iff both lie in `Q_{≥x}` and share their `x`-ancestor, for the
    /// leaves `states` of `a` (in the order of the alternating automaton's states).
    pub fn from_ancestors(a: &LayeredAutomaton, states: &[StateId]) -> Self {
        let levels = (1..=a.depth())
            .map(|x| {
                states
                    .iter()
                    .map(|&q| (q.layer >= x).then(|| a.ancestor(q, x).index))
                    .collect()
            })
            .collect();
        NestedRelations { levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Class of `q` at level `x` (1-based).
    pub fn class(&self, x: usize, q: usize) -> Option<usize> {
        self.levels[x - 1][q]
    }

    pub fn related(&self, x: usize, p: usize, q: usize) -> bool {
        match (self.class(x, p), self.class(x, q)) {
            (Some(c), Some(d)) => c == d,
            _ => false,
        }
    }
}

/// Builds a layered automaton whose semantics is `b` from nested relations satisfying
/// x-determinism, x-coherence and x-saturation for every level x.
///
/// Layer `x` has the `∼_x` classes as states; a class moves on `a` to the class of the targets
/// of any member whose `a`-action has priority `≥ x`. Layer-1 classes unreachable from the
/// initial class are dropped together with the states they contain.
pub fn layered_from_relations(b: &AlternatingAutomaton, r: &NestedRelations) -> Result<LayeredAutomaton> {
    b.check_simple()?;
    let n = b.len();
    let d = r.depth();
    if r.levels[0].len() != n {
        return Err(Error::Domain("relations and automaton have different state sets".into()));
    }
    if let Some(q) = (0..n).find(|&q| r.class(1, q).is_none()) {
        return Err(Error::precondition("totality of ∼_1", b.name(q).to_string()));
    }
    let sigma = b.alphabet();
    let action: Vec<Vec<(u32, Vec<usize>)>> = (0..n)
        .map(|q| sigma.iter().map(|a| b.action(q, a).expect("checked simple")).collect())
        .collect();
    for q in 0..n {
        for a in sigma.iter() {
            let (p, _) = &action[q][a];
            if *p == 0 || *p as usize > d {
                return Err(Error::precondition(
                    "priority range",
                    format!("({}, {}) has priority {p} outside [1, {d}]", b.name(q), sigma.symbol(a)),
                ));
            }
        }
    }
    let triple = |p: usize, a: Letter, q: usize| format!("({}, {}, {})", b.name(p), sigma.symbol(a), b.name(q));

    for x in 1..=d {
        let xp = x as u32;
        // x-determinism
        for q in 0..n {
            for a in sigma.iter() {
                let (p, targets) = &action[q][a];
                if *p != xp {
                    continue;
                }
                if r.class(x, q).is_none() {
                    return Err(Error::precondition(
                        format!("{x}-domain"),
                        format!("{} has a priority-{x} action but is not related at level {x}", b.name(q)),
                    ));
                }
                let first = targets[0];
                for &t in targets {
                    if !r.related(x, first, t) {
                        return Err(Error::precondition(format!("{x}-determinism"), triple(q, a, t)));
                    }
                }
            }
        }
        // x-coherence: members of a class agree on whether a has priority ≥ x and on the
        // ∼_x-class of the targets
        let mut seen: HashMap<(usize, Letter), (usize, Option<usize>)> = HashMap::new();
        for q in 0..n {
            let Some(c) = r.class(x, q) else { continue };
            for a in sigma.iter() {
                let (p, targets) = &action[q][a];
                let summary = if *p >= xp {
                    match r.class(x, targets[0]) {
                        Some(t) => Some(t),
                        None => {
                            return Err(Error::precondition(format!("{x}-coherence"), triple(q, a, targets[0])))
                        }
                    }
                } else {
                    None
                };
                match seen.get(&(c, a)) {
                    None => {
                        seen.insert((c, a), (q, summary));
                    }
                    Some(&(other, ref s)) if *s != summary => {
                        return Err(Error::precondition(
                            format!("{x}-coherence"),
                            format!("({}, {}, {})", b.name(other), sigma.symbol(a), b.name(q)),
                        ));
                    }
                    _ => {}
                }
            }
        }
        // x-saturation
        let mut class_members: HashMap<usize, Vec<usize>> = HashMap::new();
        for q in 0..n {
            if let Some(c) = r.class(x, q) {
                class_members.entry(c).or_default().push(q);
            }
        }
        for q in 0..n {
            for a in sigma.iter() {
                let (p, targets) = &action[q][a];
                if *p != xp {
                    continue;
                }
                let c = r.class(x, targets[0]).expect("checked by determinism");
                if let Some(&missing) = class_members[&c].iter().find(|t| !targets.contains(t)) {
                    return Err(Error::precondition(format!("{x}-saturation"), triple(q, a, missing)));
                }
            }
        }
    }

    // layer x states: classes ordered by least member; a class without sub-classes is a leaf
    // and must contain exactly one state of b, whose name it takes
    let mut class_index: Vec<HashMap<usize, usize>> = Vec::with_capacity(d);
    let mut class_rep: Vec<Vec<usize>> = Vec::with_capacity(d);
    for x in 1..=d {
        let mut idx = HashMap::new();
        let mut reps = Vec::new();
        for q in 0..n {
            if let Some(c) = r.class(x, q) {
                idx.entry(c).or_insert_with(|| {
                    reps.push(q);
                    reps.len() - 1
                });
            }
        }
        class_index.push(idx);
        class_rep.push(reps);
    }
    let mut is_parent: Vec<Vec<bool>> = class_rep.iter().map(|r| vec![false; r.len()]).collect();
    for x in 1..d {
        for q in 0..n {
            if let (Some(c), Some(_)) = (r.class(x, q), r.class(x + 1, q)) {
                is_parent[x - 1][class_index[x - 1][&c]] = true;
            }
        }
    }
    let top = |q: usize| (1..=d).rev().find(|&x| r.class(x, q).is_some()).expect("∼_1 is total");
    let mut leaf_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for q in 0..n {
        let x = top(q);
        let c = class_index[x - 1][&r.class(x, q).unwrap()];
        if is_parent[x - 1][c] {
            return Err(Error::precondition(
                "leaf correspondence",
                format!("{} is not related below level {x} but its class has sub-classes", b.name(q)),
            ));
        }
        if let Some(other) = leaf_owner.insert((x, c), q) {
            return Err(Error::precondition(
                "leaf correspondence",
                format!("{} and {} fall into the same leaf class", b.name(other), b.name(q)),
            ));
        }
    }

    let mut builder = LayeredBuilder::new(sigma.clone());
    for x in 1..=d {
        for (i, &rep) in class_rep[x - 1].iter().enumerate() {
            let name = if is_parent[x - 1][i] {
                format!("[{}]{x}", b.name(rep))
            } else {
                b.name(rep).to_string()
            };
            let parent = (x > 1).then(|| class_index[x - 2][&r.class(x - 1, rep).unwrap()]);
            builder.push_state(x, name, parent);
        }
    }
    for x in 1..=d {
        for (i, &rep) in class_rep[x - 1].iter().enumerate() {
            for a in sigma.iter() {
                let (p, targets) = &action[rep][a];
                if *p as usize >= x {
                    let c = class_index[x - 1][&r.class(x, targets[0]).unwrap()];
                    builder.set_transition(StateId::new(x, i), a, c);
                }
            }
        }
    }
    builder.set_initial_index(class_index[0][&r.class(1, b.initial()).unwrap()]);
    let result = builder.build()?.trim();
    result.ensure_valid()?;

    let init_leaf = result
        .lookup(b.name(b.initial()))
        .ok_or_else(|| Error::Internal("initial state lost".into()))?;
    let sem = crate::semantics::build_sem(&result, Some(init_leaf))?;
    let kept: Vec<bool> = (0..n).map(|q| result.lookup(b.name(q)).is_some()).collect();
    if !sem.structurally_equal(&b.restrict(&kept)) {
        return Err(Error::Internal("semantics of the reconstruction differs from the input".into()));
    }
    Ok(result)
}

/// Two-layer automaton whose semantics is the coBüchi automaton `b`: layer 1 is the automaton of
/// residuals, layer 2 the restriction of `b` to its priority-2 transitions.
///
/// `b` must be semantically deterministic, safe deterministic (at most one priority-2 successor
/// per state and letter) and 1-saturated (priority-1 transitions reach every state with the
/// target's language). The residual classes are found in two rounds: first the finest relation
/// closed under the priority-1 target sets and under successors, which already satisfies the
/// three clauses; then the language classes of the layered automaton it induces.
pub fn cobuchi_to_layered(b: &AlternatingAutomaton) -> Result<LayeredAutomaton> {
    b.check_simple()?;
    let n = b.len();
    let sigma = b.alphabet();
    let mut targets: Vec<Vec<(u32, Vec<usize>)>> = Vec::with_capacity(n);
    for q in 0..n {
        let mut row = Vec::with_capacity(sigma.len());
        for a in sigma.iter() {
            let (p, t) = b.action(q, a).expect("checked simple");
            if p != 1 && p != 2 {
                return Err(Error::precondition(
                    "coBüchi priorities",
                    format!("({}, {}) has priority {p}", b.name(q), sigma.symbol(a)),
                ));
            }
            if p == 2 && t.len() > 1 {
                return Err(Error::precondition(
                    "safe determinism",
                    format!("({}, {})", b.name(q), sigma.symbol(a)),
                ));
            }
            row.push((p, t));
        }
        targets.push(row);
    }

    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut v: usize) -> usize {
        while uf[v] != v {
            uf[v] = uf[uf[v]];
            v = uf[v];
        }
        v
    }
    fn union(uf: &mut [usize], a: usize, b: usize) -> bool {
        let (ra, rb) = (find(uf, a), find(uf, b));
        if ra == rb {
            return false;
        }
        uf[ra.max(rb)] = ra.min(rb);
        true
    }
    for row in &targets {
        for (_, t) in row {
            for &s in &t[1..] {
                union(&mut uf, t[0], s);
            }
        }
    }
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in p + 1..n {
                if find(&mut uf, p) != find(&mut uf, q) {
                    continue;
                }
                for a in sigma.iter() {
                    changed |= union(&mut uf, targets[p][a].1[0], targets[q][a].1[0]);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let identity: Vec<Option<usize>> = (0..n).map(Some).collect();
    let fine: Vec<Option<usize>> = (0..n).map(|q| Some(find(&mut uf, q))).collect();
    let first = layered_from_relations(b, &NestedRelations::new(vec![fine.clone(), identity.clone()])?)?;
    let consistency = crate::decisions::check_consistent(&first)?;
    if !consistency.consistent {
        let witness = consistency
            .witness
            .map(|(p, q)| format!("{} and {}", first.name(p), first.name(q)))
            .unwrap_or_default();
        return Err(Error::precondition("semantic determinism", witness));
    }
    let lang = crate::decisions::language_classes_unchecked(&first)?;
    let residual: Vec<Option<usize>> = (0..n)
        .map(|q| {
            Some(match first.lookup(b.name(q)) {
                Some(leaf) => lang[first.ancestor(leaf, 1).index],
                // dropped as unreachable: keep the fine class, shifted past the language classes
                None => n + fine[q].unwrap(),
            })
        })
        .collect();
    layered_from_relations(b, &NestedRelations::new(vec![residual, identity])?)
}
