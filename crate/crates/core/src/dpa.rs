use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::graph::tarjan_scc;
use crate::layered::{LayeredAutomaton, LayeredBuilder, StateId};
use crate::word::UpWord;

/// Complete deterministic parity automaton with priorities on transitions (min-parity: a run
/// is accepting iff the least priority seen infinitely often is even).
#[derive(Clone, PartialEq, Eq)]
pub struct DeterministicParityAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    /// `delta[q][a] = (target, priority)`
    delta: Vec<Vec<(usize, u32)>>,
    max_priority: u32,
}

pub type Dpa = DeterministicParityAutomaton;

impl DeterministicParityAutomaton {
    /// Builds and validates a DPA. `delta[q][a]` must be given for every state and letter.
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: usize,
        delta: Vec<Vec<(usize, u32)>>,
        max_priority: u32,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Domain("a DPA needs at least one state".into()));
        }
        if initial >= n {
            return Err(Error::Domain("initial state out of range".into()));
        }
        if max_priority == 0 {
            return Err(Error::Domain("maximal priority must be at least 1".into()));
        }
        if delta.len() != n {
            return Err(Error::Domain("transition table does not match the state count".into()));
        }
        let mut seen = HashMap::new();
        for (q, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), q).is_some() {
                return Err(Error::Domain(format!("duplicate state id `{name}`")));
            }
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::Domain(format!("state `{}` is not complete", names[q])));
            }
            for (a, &(t, p)) in row.iter().enumerate() {
                if t >= n {
                    return Err(Error::Domain(format!(
                        "transition `{}` --{}--> targets an unknown state",
                        names[q],
                        alphabet.symbol(a)
                    )));
                }
                if p == 0 || p > max_priority {
                    return Err(Error::Domain(format!(
                        "priority {p} of `{}` --{}--> outside [1, {max_priority}]",
                        names[q],
                        alphabet.symbol(a)
                    )));
                }
            }
        }
        Ok(DeterministicParityAutomaton {
            alphabet,
            names,
            initial,
            delta,
            max_priority,
        })
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

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn max_priority(&self) -> u32 {
        self.max_priority
    }

    pub fn step(&self, q: usize, a: Letter) -> (usize, u32) {
        self.delta[q][a]
    }

    pub fn run(&self, q: usize, word: &[Letter]) -> usize {
        word.iter().fold(q, |s, &a| self.delta[s][a].0)
    }

    /// Acceptance of `w` from state `q`, by running until the (state, position) pair repeats.
    pub fn accepts_from(&self, q: usize, w: &UpWord) -> bool {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trace: Vec<u32> = Vec::new();
        let (mut s, mut pos) = (q, 0usize);
        loop {
            if let Some(&start) = seen.get(&(s, pos)) {
                let min = trace[start..].iter().copied().min().expect("non-empty cycle");
                return min % 2 == 0;
            }
            seen.insert((s, pos), trace.len());
            let (t, p) = self.delta[s][w.letter_at(pos)];
            trace.push(p);
            s = t;
            pos = w.next(pos);
        }
    }

    pub fn accepts(&self, w: &UpWord) -> bool {
        self.accepts_from(self.initial, w)
    }

    pub fn reachable(&self) -> Vec<bool> {
        let succ: Vec<Vec<usize>> = self
            .delta
            .iter()
            .map(|row| row.iter().map(|&(t, _)| t).collect())
            .collect();
        crate::graph::reachable(&succ, [self.initial])
    }

    /// An up-word accepted from `q` (in `self`) and rejected from `q2` (in `other`), if any.
    ///
    /// Exact: the product graph has such a word iff some reachable cycle has an even minimal
    /// priority on the first component and an odd one on the second. For every candidate pair
    /// of minima `(e, o)` we look for an SCC of the product restricted to priorities `≥ e` and
    /// `≥ o` that contains a transition of each minimum.
    pub fn find_difference(&self, q: usize, other: &Self, q2: usize) -> Option<UpWord> {
        assert_eq!(self.alphabet.len(), other.alphabet.len(), "alphabets differ");
        let k = self.alphabet.len();
        // product states reachable from (q, q2)
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut nodes = vec![(q, q2)];
        index.insert((q, q2), 0);
        let mut bfs_parent: Vec<Option<(usize, Letter)>> = vec![None];
        let mut edges: Vec<Vec<(Letter, usize, u32, u32)>> = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            let (s, t) = nodes[i];
            let mut out = Vec::with_capacity(k);
            for a in 0..k {
                let (s2, p1) = self.delta[s][a];
                let (t2, p2) = other.delta[t][a];
                let j = *index.entry((s2, t2)).or_insert_with(|| {
                    nodes.push((s2, t2));
                    bfs_parent.push(Some((i, a)));
                    nodes.len() - 1
                });
                out.push((a, j, p1, p2));
            }
            edges.push(out);
            i += 1;
        }
        let n = nodes.len();
        for e in (2..=self.max_priority).step_by(2) {
            for o in (1..=other.max_priority).step_by(2) {
                let succ: Vec<Vec<usize>> = (0..n)
                    .map(|v| {
                        edges[v]
                            .iter()
                            .filter(|&&(_, _, p1, p2)| p1 >= e && p2 >= o)
                            .map(|&(_, w, _, _)| w)
                            .collect()
                    })
                    .collect();
                let (comp, _) = tarjan_scc(&succ);
                let mut has_e: HashMap<usize, (usize, Letter)> = HashMap::new();
                let mut has_o: HashMap<usize, (usize, Letter)> = HashMap::new();
                for v in 0..n {
                    for &(a, w, p1, p2) in &edges[v] {
                        if p1 >= e && p2 >= o && comp[v] == comp[w] {
                            if p1 == e {
                                has_e.entry(comp[v]).or_insert((v, a));
                            }
                            if p2 == o {
                                has_o.entry(comp[v]).or_insert((v, a));
                            }
                        }
                    }
                }
                let mut found: Vec<usize> = has_e.keys().filter(|c| has_o.contains_key(c)).copied().collect();
                found.sort();
                if let Some(&c) = found.first() {
                    let (ve, ae) = has_e[&c];
                    let (vo, ao) = has_o[&c];
                    let inside = |v: usize, w: usize| comp[v] == c && comp[w] == c;
                    let step = |v: usize, a: Letter| edges[v][a].1;
                    let allowed = |v: usize, a: Letter| {
                        let (_, w, p1, p2) = edges[v][a];
                        p1 >= e && p2 >= o && inside(v, w)
                    };
                    let mut prefix = Vec::new();
                    let mut cur = ve;
                    while let Some((p, a)) = bfs_parent[cur] {
                        prefix.push(a);
                        cur = p;
                    }
                    prefix.reverse();
                    let mut period = vec![ae];
                    let after_e = step(ve, ae);
                    period.extend(path_within(n, k, &allowed, &step, after_e, vo));
                    period.push(ao);
                    let after_o = step(vo, ao);
                    period.extend(path_within(n, k, &allowed, &step, after_o, ve));
                    return Some(UpWord::new(prefix, period).expect("period is non-empty"));
                }
            }
        }
        None
    }

    /// `L(self) ⊆ L(other)`, decided exactly on the product.
    pub fn is_included_in(&self, other: &Self) -> bool {
        self.find_difference(self.initial, other, other.initial).is_none()
    }

    /// Partition of the reachable states by residual language; returns a class id per state
    /// (unreachable states get their own classes after the reachable ones).
    pub fn residual_classes(&self) -> Vec<usize> {
        let n = self.len();
        let reach = self.reachable();
        let mut class = vec![usize::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for q in (0..n).filter(|&q| reach[q]) {
            let found = reps.iter().position(|&r| {
                self.find_difference(q, self, r).is_none() && self.find_difference(r, self, q).is_none()
            });
            match found {
                Some(c) => class[q] = c,
                None => {
                    class[q] = reps.len();
                    reps.push(q);
                }
            }
        }
        let mut next = reps.len();
        for c in class.iter_mut().filter(|c| **c == usize::MAX) {
            *c = next;
            next += 1;
        }
        class
    }
}

/// Shortest path from `from` to `to` using allowed letters, as a word.
fn path_within(
    n: usize,
    k: usize,
    allowed: &impl Fn(usize, Letter) -> bool,
    step: &impl Fn(usize, Letter) -> usize,
    from: usize,
    to: usize,
) -> Vec<Letter> {
    if from == to {
        return Vec::new();
    }
    let mut parent: Vec<Option<(usize, Letter)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for a in 0..k {
            if !allowed(v, a) {
                continue;
            }
            let w = step(v, a);
            if seen[w] {
                continue;
            }
            seen[w] = true;
            parent[w] = Some((v, a));
            if w == to {
                let mut word = Vec::new();
                let mut cur = to;
                while cur != from {
                    let (p, l) = parent[cur].expect("bfs tree");
                    word.push(l);
                    cur = p;
                }
                word.reverse();
                return word;
            }
            queue.push_back(w);
        }
    }
    unreachable!("target lies in the same SCC")
}

impl fmt::Debug for DeterministicParityAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DPA over {:?}, initial {}", self.alphabet, self.names[self.initial])?;
        for (q, row) in self.delta.iter().enumerate() {
            write!(f, "  {}:", self.names[q])?;
            for (a, &(t, p)) in row.iter().enumerate() {
                write!(f, " {}:{}→{}", self.alphabet.symbol(a), p, self.names[t])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Name of the layer-`x` copy of a DPA state in [`dpa_to_layered`].
pub fn layer_copy_name(name: &str, x: usize) -> String {
    format!("{name}@{x}")
}

/// Layer `x` is the DPA restricted to transitions of priority `≥ x`; the copy of `q` on layer
/// `x + 1` has the copy of `q` on layer `x` as parent. States unreachable in the DPA are
/// dropped with all their copies.
pub fn dpa_to_layered(dpa: &Dpa) -> LayeredAutomaton {
    let reach = dpa.reachable();
    let kept: Vec<usize> = (0..dpa.len()).filter(|&q| reach[q]).collect();
    let mut pos = vec![usize::MAX; dpa.len()];
    for (i, &q) in kept.iter().enumerate() {
        pos[q] = i;
    }
    let d = dpa.max_priority() as usize;
    let mut b = LayeredBuilder::new(dpa.alphabet().clone());
    for x in 1..=d {
        for (i, &q) in kept.iter().enumerate() {
            let parent = if x == 1 { None } else { Some(i) };
            b.push_state(x, layer_copy_name(dpa.name(q), x), parent);
        }
    }
    for x in 1..=d {
        for (i, &q) in kept.iter().enumerate() {
            for a in dpa.alphabet().iter() {
                let (t, p) = dpa.step(q, a);
                if p as usize >= x {
                    b.set_transition(StateId::new(x, i), a, pos[t]);
                }
            }
        }
    }
    b.set_initial_index(pos[dpa.initial()]);
    b.build().expect("conversion is well formed")
}
