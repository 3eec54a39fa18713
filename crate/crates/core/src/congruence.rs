//! The canonical layered automaton built directly from a language, via the congruence on tuples of
//! finite words.
//!
//! Words are represented by their transition profiles on a reference DPA: for every state, the
//! state reached and the least priority seen. Residuals and lasso acceptance only depend on
//! profiles, so every quantification over words becomes a finite one over the profile monoid.
//!
//! A tuple of length `x + 1` is described by the class `c` of its first `x` components and the
//! profile `m` of its last component. Its class is determined by the class of the merged tuple
//! and by its safe language, which is a residual language of the finite graph
//! `(c, m) → (c, m·a)`; classes on each layer are therefore computed by partition refinement.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Letter};
use crate::dpa::Dpa;
use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, LayeredBuilder, StateId};

/// Priority of the empty run; neutral for `min`.
pub const NEUTRAL: u32 = u32::MAX;

/// The effect of a finite word on a DPA: per state, the state reached and the least priority.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransitionProfile(pub Vec<(usize, u32)>);

impl TransitionProfile {
    pub fn identity(n: usize) -> Self {
        TransitionProfile((0..n).map(|q| (q, NEUTRAL)).collect())
    }

    pub fn of_letter(d: &Dpa, a: Letter) -> Self {
        TransitionProfile((0..d.len()).map(|q| d.step(q, a)).collect())
    }

    pub fn of_word(d: &Dpa, w: &[Letter]) -> Self {
        w.iter()
            .fold(Self::identity(d.len()), |p, &a| p.then(&Self::of_letter(d, a)))
    }

    /// The profile of `u·v` where `self` is the profile of `u` and `other` that of `v`.
    pub fn then(&self, other: &TransitionProfile) -> TransitionProfile {
        TransitionProfile(
            self.0
                .iter()
                .map(|&(q, p)| {
                    let (q2, p2) = other.0[q];
                    (q2, p.min(p2))
                })
                .collect(),
        )
    }

    /// Whether `q·z^ω` is accepted, where `self` is the profile of the non-empty word `z`.
    pub fn lasso_accepts(&self, q: usize) -> bool {
        let mut seen = vec![usize::MAX; self.0.len()];
        let mut order = Vec::new();
        let mut s = q;
        while seen[s] == usize::MAX {
            seen[s] = order.len();
            order.push(s);
            s = self.0[s].0;
        }
        let min = order[seen[s]..].iter().map(|&t| self.0[t].1).min().expect("cycle");
        debug_assert!(min != NEUTRAL, "loop word must be non-empty");
        min % 2 == 0
    }
}

/// The profiles of all finite words, with right multiplication by letters. Element 0 is the
/// identity (the profile of the empty word); every other element is the profile of some
/// non-empty word, and no such profile equals the identity since its priorities are finite.
#[derive(Clone, Debug)]
pub struct ProfileMonoid {
    elements: Vec<TransitionProfile>,
    right: Vec<Vec<usize>>,
    /// Breadth-first tree: `(element, letter)` whose product is this element.
    tree: Vec<Option<(usize, Letter)>>,
}

impl ProfileMonoid {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, m: usize) -> &TransitionProfile {
        &self.elements[m]
    }

    /// Elements realised by non-empty words.
    pub fn non_empty(&self) -> impl Iterator<Item = usize> {
        1..self.elements.len()
    }

    pub fn times_letter(&self, m: usize, a: Letter) -> usize {
        self.right[m][a]
    }

    /// A shortest word with profile `m`, least in the letter order among those found first by
    /// breadth-first search.
    pub fn word(&self, m: usize) -> Vec<Letter> {
        let mut w = Vec::new();
        let mut cur = m;
        while let Some((p, a)) = self.tree[cur] {
            w.push(a);
            cur = p;
        }
        w.reverse();
        w
    }

    pub fn times(&self, m: usize, n: usize) -> usize {
        self.word(n).into_iter().fold(m, |e, a| self.right[e][a])
    }

    pub fn of_word(&self, w: &[Letter]) -> usize {
        w.iter().fold(0, |e, &a| self.right[e][a])
    }

    pub fn index_of(&self, p: &TransitionProfile) -> Option<usize> {
        self.elements.iter().position(|e| e == p)
    }
}

/// Breadth-first closure of the letter profiles of `d` under composition.
pub fn profile_monoid(d: &Dpa, limit: usize) -> Result<ProfileMonoid> {
    let k = d.alphabet().len();
    let letters: Vec<TransitionProfile> = d.alphabet().iter().map(|a| TransitionProfile::of_letter(d, a)).collect();
    let mut elements = vec![TransitionProfile::identity(d.len())];
    let mut index: HashMap<TransitionProfile, usize> = HashMap::from([(elements[0].clone(), 0)]);
    let mut tree = vec![None];
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        let mut row = Vec::with_capacity(k);
        for (a, la) in letters.iter().enumerate() {
            let p = elements[i].then(la);
            let j = match index.get(&p) {
                Some(&j) => j,
                None => {
                    if elements.len() >= limit {
                        return Err(Error::Resource(format!("profile monoid exceeds {limit} elements")));
                    }
                    elements.push(p.clone());
                    tree.push(Some((i, a)));
                    index.insert(p, elements.len() - 1);
                    elements.len() - 1
                }
            };
            row.push(j);
        }
        right.push(row);
        i += 1;
    }
    Ok(ProfileMonoid { elements, right, tree })
}

/// The classes of all tuples of one length.
#[derive(Clone, Debug)]
struct Layer {
    /// Class of the tuple `(ū, u)` for `ū` in class `c` of the previous layer and `u` with
    /// profile `m`, as `pair[c][m]`; `None` is `⊥`. On layer 1 there is a single row.
    pair: Vec<Vec<Option<usize>>>,
    /// Concatenation of a letter to the last component.
    step: Vec<Vec<Option<usize>>>,
    /// Class of the merged tuple on the previous layer.
    merged: Vec<Option<usize>>,
    /// DPA state reached by the concatenation of all components of a representative.
    state: Vec<usize>,
    /// Representative tuple of monoid elements.
    rep: Vec<Vec<usize>>,
    /// Whether the class contains a pointed tuple.
    pointed: Vec<bool>,
    /// `cond[c][m]`: the pointedness clause for extending a pointed tuple of class `c` of the
    /// previous layer by `m`. Empty on layer 1.
    cond: Vec<Vec<bool>>,
}

impl Layer {
    fn len(&self) -> usize {
        self.step.len()
    }
}

/// The congruence of a reference DPA, computed layer by layer until no class survives.
#[derive(Clone, Debug)]
pub struct Congruence {
    dpa: Dpa,
    monoid: ProfileMonoid,
    layers: Vec<Layer>,
}

/// Caps for [`build_congruence_automaton`].
#[derive(Clone, Copy, Debug)]
pub struct CongruenceLimits {
    pub layers: usize,
    pub monoid: usize,
}

impl Default for CongruenceLimits {
    fn default() -> Self {
        CongruenceLimits {
            layers: 16,
            monoid: 20_000,
        }
    }
}

/// Class id of every element of `monoid` under a congruence-closed refinement of `initial`,
/// with `succ[v][a]` as transitions. Moore's algorithm on the blocks.
fn refine(initial: &[usize], succ: &[Vec<usize>]) -> Vec<usize> {
    let mut block = initial.to_vec();
    loop {
        let mut keys: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(block.len());
        for v in 0..block.len() {
            let key = (block[v], succ[v].iter().map(|&w| block[w]).collect::<Vec<_>>());
            let n = keys.len();
            next.push(*keys.entry(key).or_insert(n));
        }
        let before = block.iter().copied().max().map_or(0, |m| m + 1);
        let after = keys.len();
        block = next;
        if after == before {
            return block;
        }
    }
}

impl Congruence {
    pub fn new(d: &Dpa, limits: CongruenceLimits) -> Result<Self> {
        let monoid = profile_monoid(d, limits.monoid)?;
        let mut c = Congruence {
            dpa: d.clone(),
            monoid,
            layers: Vec::new(),
        };
        c.layers.push(c.first_layer());
        while c.layers.last().is_some_and(|l| l.len() > 0) {
            if c.layers.len() > limits.layers {
                return Err(Error::Resource(format!(
                    "congruence has non-⊥ tuples beyond {} components",
                    limits.layers
                )));
            }
            let next = c.next_layer();
            c.layers.push(next);
        }
        c.layers.pop();
        Ok(c)
    }

    pub fn monoid(&self) -> &ProfileMonoid {
        &self.monoid
    }

    /// Number of layers with a non-⊥ class.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of classes of tuples of length `x`, `⊥` excluded.
    pub fn class_count(&self, x: usize) -> usize {
        self.layers.get(x - 1).map_or(0, Layer::len)
    }

    /// Number of classes of length `x` containing a pointed tuple.
    pub fn pointed_count(&self, x: usize) -> usize {
        self.layers
            .get(x - 1)
            .map_or(0, |l| l.pointed.iter().filter(|&&p| p).count())
    }

    /// Layer 1: residual classes of the states reached by the monoid elements.
    fn first_layer(&self) -> Layer {
        let d = &self.dpa;
        let q0 = d.initial();
        let reach_state = |m: usize| self.monoid.element(m).0[q0].0;
        let mut reps: Vec<usize> = Vec::new(); // representative element per class
        let mut class_of_state: HashMap<usize, usize> = HashMap::new();
        let mut pair = Vec::with_capacity(self.monoid.len());
        for m in 0..self.monoid.len() {
            let q = reach_state(m);
            let c = match class_of_state.get(&q) {
                Some(&c) => c,
                None => {
                    let found = reps.iter().position(|&r| {
                        let s = reach_state(r);
                        d.find_difference(q, d, s).is_none() && d.find_difference(s, d, q).is_none()
                    });
                    let c = found.unwrap_or_else(|| {
                        reps.push(m);
                        reps.len() - 1
                    });
                    class_of_state.insert(q, c);
                    c
                }
            };
            pair.push(Some(c));
        }
        let step = reps
            .iter()
            .map(|&r| {
                d.alphabet()
                    .iter()
                    .map(|a| pair[self.monoid.times_letter(r, a)])
                    .collect()
            })
            .collect();
        Layer {
            pair: vec![pair],
            step,
            merged: vec![None; reps.len()],
            state: reps.iter().map(|&r| reach_state(r)).collect(),
            rep: reps.iter().map(|&r| vec![r]).collect(),
            pointed: vec![true; reps.len()],
            cond: Vec::new(),
        }
    }

    /// Class reached from class `c` of `layer` by concatenating a word with profile `m`.
    fn walk(&self, layer: &Layer, c: Option<usize>, m: usize) -> Option<usize> {
        self.monoid
            .word(m)
            .into_iter()
            .try_fold(c?, |c, a| layer.step[c][a])
    }

    /// `T[c][m]` for all classes `c` and elements `m`, following the breadth-first tree of the
    /// monoid.
    fn concat_table(&self, layer: &Layer) -> Vec<Vec<Option<usize>>> {
        let n = self.monoid.len();
        (0..layer.len())
            .map(|c| {
                let mut row: Vec<Option<usize>> = vec![None; n];
                row[0] = Some(c);
                for m in 1..n {
                    let (p, a) = self.monoid.tree[m].expect("non-identity element");
                    row[m] = row[p].and_then(|cp| layer.step[cp][a]);
                }
                row
            })
            .collect()
    }

    fn next_layer(&self) -> Layer {
        let x = self.layers.len();
        let prev = &self.layers[x - 1];
        let n = self.monoid.len();
        let k = self.dpa.alphabet().len();
        let concat = self.concat_table(prev);
        let want_even = (x + 1).is_multiple_of(2);
        // notbot[c][m]: some non-empty w returns m·w to c with a lasso of the right parity.
        let notbot: Vec<Vec<bool>> = (0..prev.len())
            .map(|c| {
                let good: Vec<bool> = (0..n)
                    .map(|z| {
                        z != 0
                            && concat[c][z] == Some(c)
                            && self.monoid.element(z).lasso_accepts(prev.state[c]) == want_even
                    })
                    .collect();
                // elements with a path of length ≥ 1 into `good`
                let mut back: Vec<Vec<usize>> = vec![Vec::new(); n];
                for m in 0..n {
                    for a in 0..k {
                        back[self.monoid.right[m][a]].push(m);
                    }
                }
                let mut reach = vec![false; n];
                let mut stack: Vec<usize> = (0..n).filter(|&z| good[z]).collect();
                let mut seen = good.clone();
                while let Some(z) = stack.pop() {
                    for &m in &back[z] {
                        reach[m] = true;
                        if !seen[m] {
                            seen[m] = true;
                            stack.push(m);
                        }
                    }
                }
                reach
            })
            .collect();
        // refine the pair graph by the safe language
        let id = |c: usize, m: usize| c * n + m;
        let succ: Vec<Vec<usize>> = (0..prev.len() * n)
            .map(|v| {
                let (c, m) = (v / n, v % n);
                (0..k).map(|a| id(c, self.monoid.right[m][a])).collect()
            })
            .collect();
        let initial: Vec<usize> = (0..prev.len() * n)
            .map(|v| notbot[v / n][v % n] as usize)
            .collect();
        let block = refine(&initial, &succ);
        let mut key_class: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pair: Vec<Vec<Option<usize>>> = vec![vec![None; n]; prev.len()];
        let mut members: Vec<(usize, usize)> = Vec::new();
        for c in 0..prev.len() {
            for m in 0..n {
                if !notbot[c][m] {
                    continue;
                }
                let merged = concat[c][m].expect("non-⊥ tuples merge to non-⊥ tuples");
                let len = key_class.len();
                let cls = *key_class.entry((merged, block[id(c, m)])).or_insert_with(|| {
                    members.push((c, m));
                    len
                });
                pair[c][m] = Some(cls);
            }
        }
        let count = members.len();
        let step: Vec<Vec<Option<usize>>> = members
            .iter()
            .map(|&(c, m)| (0..k).map(|a| pair[c][self.monoid.right[m][a]]).collect())
            .collect();
        let mut layer = Layer {
            pair,
            step,
            merged: members.iter().map(|&(c, m)| concat[c][m]).collect(),
            state: members
                .iter()
                .map(|&(c, m)| self.monoid.element(m).0[prev.state[c]].0)
                .collect(),
            rep: members
                .iter()
                .map(|&(c, m)| {
                    let mut r = prev.rep[c].clone();
                    r.push(m);
                    r
                })
                .collect(),
            pointed: vec![false; count],
            cond: vec![vec![false; n]; prev.len()],
        };
        // pointedness: from every pointed class c' and v with c'·v ~ c, the tuple (c', v·m)
        // is ⊥ or equivalent to (c, m)
        let mut arriving: Vec<Vec<(usize, usize)>> = vec![Vec::new(); prev.len()];
        for c2 in (0..prev.len()).filter(|&c2| prev.pointed[c2]) {
            for v in 0..n {
                if let Some(c) = concat[c2][v] {
                    arriving[c].push((c2, v));
                }
            }
        }
        for c in (0..prev.len()).filter(|&c| prev.pointed[c]) {
            for m in 0..n {
                let Some(target) = layer.pair[c][m] else { continue };
                let ok = arriving[c].iter().all(|&(c2, v)| {
                    let t = self.walk(&layer, layer.pair[c2][v], m);
                    t.is_none() || t == Some(target)
                });
                layer.cond[c][m] = ok;
                if ok {
                    layer.pointed[target] = true;
                }
            }
        }
        layer
    }

    /// Class of a tuple of monoid elements and whether the tuple itself is pointed; `None` for
    /// `⊥`.
    pub fn describe(&self, t: &[usize]) -> Result<(Option<usize>, bool)> {
        if t.is_empty() {
            return Err(Error::Domain("tuples have at least one component".into()));
        }
        if let Some(&m) = t.iter().find(|&&m| m >= self.monoid.len()) {
            return Err(Error::Domain(format!("monoid element {m} out of range")));
        }
        let mut class = self.layers[0].pair[0][t[0]];
        let mut pointed = true;
        for (i, &m) in t.iter().enumerate().skip(1) {
            let Some(layer) = self.layers.get(i) else {
                return Ok((None, false));
            };
            let Some(c) = class else {
                return Ok((None, false));
            };
            pointed = pointed && layer.cond[c][m];
            class = layer.pair[c][m];
        }
        Ok((class, pointed && class.is_some()))
    }

    pub fn tuple_bot(&self, t: &[usize]) -> Result<bool> {
        Ok(self.describe(t)?.0.is_none())
    }

    pub fn tuple_equiv(&self, s: &[usize], t: &[usize]) -> Result<bool> {
        if s.len() != t.len() {
            return Err(Error::Domain(format!(
                "tuples of lengths {} and {} are never compared",
                s.len(),
                t.len()
            )));
        }
        Ok(self.describe(s)?.0 == self.describe(t)?.0)
    }

    pub fn tuple_pointed(&self, t: &[usize]) -> Result<bool> {
        let (class, pointed) = self.describe(t)?;
        if class.is_none() {
            return Err(Error::precondition("tuple is not ⊥", format!("{t:?}")));
        }
        Ok(pointed)
    }

    /// `t` with `m` concatenated to its last component.
    pub fn concat(&self, t: &[usize], m: usize) -> Vec<usize> {
        let mut r = t.to_vec();
        let last = r.len() - 1;
        r[last] = self.monoid.times(r[last], m);
        r
    }

    /// `t` with its last two components merged.
    pub fn merge(&self, t: &[usize]) -> Vec<usize> {
        assert!(t.len() >= 2, "merging needs two components");
        let mut r = t[..t.len() - 1].to_vec();
        let last = r.len() - 1;
        r[last] = self.monoid.times(r[last], t[t.len() - 1]);
        r
    }

    /// The safe-language signature: for every element `m`, whether `t·m` is not `⊥`.
    pub fn signature(&self, t: &[usize]) -> Result<Vec<bool>> {
        (0..self.monoid.len())
            .map(|m| Ok(!self.tuple_bot(&self.concat(t, m))?))
            .collect()
    }

    fn tuple_name(&self, rep: &[usize]) -> String {
        let alphabet: &Alphabet = self.dpa.alphabet();
        let sep = if alphabet.symbols().iter().any(|s| s.chars().count() > 1) { "." } else { "" };
        let parts: Vec<String> = rep
            .iter()
            .map(|&m| {
                let w = self.monoid.word(m);
                if w.is_empty() {
                    "ε".to_string()
                } else {
                    w.iter().map(|&a| alphabet.symbol(a)).collect::<Vec<_>>().join(sep)
                }
            })
            .collect();
        format!("({})", parts.join(","))
    }

    /// The layered automaton whose layer `x` consists of the classes of length-`x` tuples that
    /// contain a pointed tuple.
    pub fn automaton(&self) -> Result<LayeredAutomaton> {
        let mut b = LayeredBuilder::new(self.dpa.alphabet().clone());
        let mut kept: Vec<Vec<Option<usize>>> = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let x = i + 1;
            let mut pos = vec![None; layer.len()];
            let mut next = 0;
            for c in (0..layer.len()).filter(|&c| layer.pointed[c]) {
                pos[c] = Some(next);
                next += 1;
            }
            if next == 0 {
                break;
            }
            for c in (0..layer.len()).filter(|&c| layer.pointed[c]) {
                let parent = if x == 1 {
                    None
                } else {
                    let m = layer.merged[c].expect("merged class");
                    Some(kept[i - 1][m].ok_or_else(|| {
                        Error::Internal("the merge of a pointed tuple is not pointed".into())
                    })?)
                };
                b.push_state(x, self.tuple_name(&layer.rep[c]), parent);
            }
            kept.push(pos);
        }
        for (i, pos) in kept.iter().enumerate() {
            let layer = &self.layers[i];
            for c in 0..layer.len() {
                let Some(p) = pos[c] else { continue };
                for (a, t) in layer.step[c].iter().enumerate() {
                    if let Some(t) = t {
                        let tp = pos[*t].ok_or_else(|| {
                            Error::Internal("a letter leads from a pointed class to a non-pointed one".into())
                        })?;
                        b.set_transition(StateId::new(i + 1, p), a, tp);
                    }
                }
            }
        }
        let init = self.layers[0].pair[0][0].expect("layer-1 class of ε");
        b.set_initial_index(kept[0][init].expect("layer 1 is pointed"));
        b.build()
    }
}

/// The canonical layered automaton for the language of `d`, built from the congruence.
pub fn build_congruence_automaton(d: &Dpa, limits: CongruenceLimits) -> Result<LayeredAutomaton> {
    let c = Congruence::new(d, limits)?;
    let max = d.max_priority() as usize;
    if c.depth() > max {
        return Err(Error::Internal(format!(
            "non-⊥ tuples of length {} for priorities up to {max}",
            c.depth()
        )));
    }
    c.automaton()
}
