use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{Error, Result};

/// A state of a layered automaton: its layer (1-based) and its index inside that layer.
///
/// The derived order (layer first, then declaration order inside the layer) is the global
/// state order used for tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId {
    pub layer: usize,
    pub index: usize,
}

impl StateId {
    pub fn new(layer: usize, index: usize) -> Self {
        StateId { layer, index }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layer {
    pub(crate) names: Vec<String>,
    pub(crate) delta: Vec<Vec<Option<usize>>>,
    /// Parent index in the previous layer; empty for layer 1.
    pub(crate) parent: Vec<usize>,
    pub(crate) children: Vec<Vec<usize>>,
}

impl Layer {
    fn len(&self) -> usize {
        self.names.len()
    }
}

/// A transition that was declared on top of an existing one for the same `(state, letter)`.
/// Kept only so that [`LayeredAutomaton::validate`] can report the determinism violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Conflict {
    pub(crate) state: StateId,
    pub(crate) letter: Letter,
    pub(crate) target: usize,
}

/// A stack of deterministic partial transition systems `T_1, ..., T_d` linked by parent maps
/// `μ_x : Q_{x+1} → Q_x`.
///
/// Values are immutable; transformations build new automata.
#[derive(Clone, PartialEq, Eq)]
pub struct LayeredAutomaton {
    alphabet: Alphabet,
    pub(crate) layers: Vec<Layer>,
    initial: usize,
    pub(crate) conflicts: Vec<Conflict>,
}

/// One violated structural invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    Incomplete { state: String, symbol: String },
    Unreachable { state: String },
    Nondeterministic { layer: usize, state: String, symbol: String, targets: Vec<String> },
    Morphism { layer: usize, state: String, symbol: String },
    NamespaceClash { name: String, layers: Vec<usize> },
    EmptyLayer { layer: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Incomplete { state, symbol } => {
                write!(f, "completeness: layer-1 state `{state}` has no `{symbol}` transition")
            }
            Diagnostic::Unreachable { state } => {
                write!(f, "reachability: layer-1 state `{state}` is not reachable from the initial state")
            }
            Diagnostic::Nondeterministic { layer, state, symbol, targets } => write!(
                f,
                "determinism: state `{state}` of layer {layer} has several `{symbol}` successors ({})",
                targets.join(", ")
            ),
            Diagnostic::Morphism { layer, state, symbol } => write!(
                f,
                "morphism: transition `{state}` --{symbol}--> in layer {layer} is not mirrored by its parent"
            ),
            Diagnostic::NamespaceClash { name, layers } => write!(
                f,
                "namespace: state id `{name}` occurs on layers {:?}",
                layers
            ),
            Diagnostic::EmptyLayer { layer } => write!(f, "layer {layer} has no states"),
        }
    }
}

impl LayeredAutomaton {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of layers `d`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Number of states of layer `x` (1-based); 0 for layers beyond the depth.
    pub fn layer_len(&self, x: usize) -> usize {
        if x == 0 || x > self.layers.len() {
            0
        } else {
            self.layers[x - 1].len()
        }
    }

    pub fn state_count(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    /// All states in global order.
    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(i, l)| (0..l.len()).map(move |j| StateId::new(i + 1, j)))
    }

    pub fn layer_states(&self, x: usize) -> impl Iterator<Item = StateId> {
        (0..self.layer_len(x)).map(move |j| StateId::new(x, j))
    }

    pub fn initial(&self) -> StateId {
        StateId::new(1, self.initial)
    }

    pub fn contains(&self, s: StateId) -> bool {
        s.layer >= 1 && s.index < self.layer_len(s.layer)
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.layer(s.layer).names[s.index]
    }

    /// First state (in global order) carrying the given id.
    pub fn lookup(&self, name: &str) -> Option<StateId> {
        self.states().find(|&s| self.name(s) == name)
    }

    pub fn lookup_or_err(&self, name: &str) -> Result<StateId> {
        self.lookup(name)
            .ok_or_else(|| Error::Domain(format!("unknown state `{name}`")))
    }

    pub(crate) fn layer(&self, x: usize) -> &Layer {
        &self.layers[x - 1]
    }

    /// `δ_x(s, a)` inside the layer of `s`.
    pub fn succ(&self, s: StateId, a: Letter) -> Option<StateId> {
        self.layer(s.layer).delta[s.index][a].map(|t| StateId::new(s.layer, t))
    }

    /// Letters with a defined transition from `s`, in symbol order.
    pub fn letters(&self, s: StateId) -> Vec<Letter> {
        self.alphabet.iter().filter(|&a| self.succ(s, a).is_some()).collect()
    }

    /// `μ_{x-1}(s)` for a state of layer `x ≥ 2`.
    pub fn parent(&self, s: StateId) -> Option<StateId> {
        if s.layer <= 1 {
            None
        } else {
            Some(StateId::new(s.layer - 1, self.layer(s.layer).parent[s.index]))
        }
    }

    /// Children of `s` in layer `x + 1`, in declaration order.
    pub fn children(&self, s: StateId) -> impl Iterator<Item = StateId> + '_ {
        let x = s.layer;
        let kids: &[usize] = if x < self.depth() {
            &self.layer(x).children[s.index]
        } else {
            &[]
        };
        kids.iter().map(move |&c| StateId::new(x + 1, c))
    }

    pub fn has_children(&self, s: StateId) -> bool {
        s.layer < self.depth() && !self.layer(s.layer).children[s.index].is_empty()
    }

    pub fn is_leaf(&self, s: StateId) -> bool {
        !self.has_children(s)
    }

    /// `μ̂_x(s)`; panics when `x > s.layer`.
    pub fn ancestor(&self, s: StateId, x: usize) -> StateId {
        assert!(x >= 1 && x <= s.layer, "ancestor layer out of range");
        let mut cur = s;
        while cur.layer > x {
            cur = self.parent(cur).expect("layers above 1 have parents");
        }
        cur
    }

    /// `μ̂_x(q)`; a domain error when `x` exceeds the layer of `q`.
    pub fn ancestor_at(&self, q: StateId, x: usize) -> Result<StateId> {
        if !self.contains(q) {
            return Err(Error::Domain(format!("{q:?} is not a state")));
        }
        if x == 0 || x > q.layer {
            return Err(Error::Domain(format!(
                "layer {x} is not at or below the layer {} of `{}`",
                q.layer,
                self.name(q)
            )));
        }
        Ok(self.ancestor(q, x))
    }

    /// `llayer(q, a)`: the largest layer `x ≤ llayer(q)` with `δ_x(μ̂_x(q), a)` defined.
    pub fn action_layer(&self, q: StateId, a: Letter) -> usize {
        let mut cur = q;
        loop {
            if self.succ(cur, a).is_some() || cur.layer == 1 {
                return cur.layer;
            }
            cur = self.parent(cur).expect("layers above 1 have parents");
        }
    }

    /// States that are not the parent of any state.
    pub fn leaves(&self) -> Vec<StateId> {
        self.states().filter(|&s| self.is_leaf(s)).collect()
    }

    /// `[s]`: the leaves `q` with `μ̂_{layer(s)}(q) = s`, in global order.
    pub fn leaves_under(&self, s: StateId) -> Vec<StateId> {
        let mut out = Vec::new();
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for t in frontier {
                if self.is_leaf(t) {
                    out.push(t);
                } else {
                    next.extend(self.children(t));
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    /// `s` and every state below it.
    pub fn subtree(&self, s: StateId) -> Vec<StateId> {
        let mut out = vec![s];
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            out.extend(self.children(t));
            i += 1;
        }
        out.sort();
        out
    }

    /// Runs the word inside the layer of `s`.
    pub fn run(&self, s: StateId, word: &[Letter]) -> Option<StateId> {
        let mut cur = s;
        for &a in word {
            cur = self.succ(cur, a)?;
        }
        Some(cur)
    }

    /// Every violated invariant; an empty list means the automaton is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.len() == 0 {
                out.push(Diagnostic::EmptyLayer { layer: i + 1 });
            }
        }
        if self.layers.is_empty() || self.layers[0].len() == 0 {
            return out;
        }
        for s in self.layer_states(1) {
            for a in self.alphabet.iter() {
                if self.succ(s, a).is_none() {
                    out.push(Diagnostic::Incomplete {
                        state: self.name(s).to_string(),
                        symbol: self.alphabet.symbol(a).to_string(),
                    });
                }
            }
        }
        let reach = self.reachable_layer1();
        for s in self.layer_states(1) {
            if !reach[s.index] {
                out.push(Diagnostic::Unreachable {
                    state: self.name(s).to_string(),
                });
            }
        }
        let mut conflicts = self.conflicts.clone();
        conflicts.sort_by_key(|c| (c.state, c.letter, c.target));
        let mut i = 0;
        while i < conflicts.len() {
            let (state, letter) = (conflicts[i].state, conflicts[i].letter);
            let mut targets = vec![self.layer(state.layer).delta[state.index][letter]
                .map(|t| self.layer(state.layer).names[t].clone())
                .unwrap_or_default()];
            while i < conflicts.len() && conflicts[i].state == state && conflicts[i].letter == letter {
                targets.push(self.layer(state.layer).names[conflicts[i].target].clone());
                i += 1;
            }
            out.push(Diagnostic::Nondeterministic {
                layer: state.layer,
                state: self.name(state).to_string(),
                symbol: self.alphabet.symbol(letter).to_string(),
                targets,
            });
        }
        for x in 2..=self.depth() {
            for s in self.layer_states(x) {
                let p = self.parent(s).expect("parent");
                for a in self.alphabet.iter() {
                    if let Some(t) = self.succ(s, a) {
                        if self.succ(p, a) != self.parent(t) {
                            out.push(Diagnostic::Morphism {
                                layer: x,
                                state: self.name(s).to_string(),
                                symbol: self.alphabet.symbol(a).to_string(),
                            });
                        }
                    }
                }
            }
        }
        let mut seen: HashMap<&str, Vec<usize>> = HashMap::new();
        for s in self.states() {
            let layers = seen.entry(self.name(s)).or_default();
            if !layers.contains(&s.layer) {
                layers.push(s.layer);
            }
        }
        let mut clashes: Vec<(&str, Vec<usize>)> =
            seen.into_iter().filter(|(_, l)| l.len() > 1).collect();
        clashes.sort();
        for (name, layers) in clashes {
            out.push(Diagnostic::NamespaceClash {
                name: name.to_string(),
                layers,
            });
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Fails with [`Error::Invalid`] when [`LayeredAutomaton::validate`] reports anything.
    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diags))
        }
    }

    fn reachable_layer1(&self) -> Vec<bool> {
        let layer = self.layer(1);
        let succ: Vec<Vec<usize>> = layer
            .delta
            .iter()
            .map(|row| row.iter().flatten().copied().collect())
            .collect();
        crate::graph::reachable(&succ, [self.initial])
    }

    /// The sub-automaton keeping the states accepted by `keep_state` (a state is dropped
    /// together with its parent) and the transitions accepted by `keep_edge` whose target is
    /// kept. Trailing empty layers disappear. `initial` replaces the initial state.
    pub(crate) fn restrict(
        &self,
        initial: StateId,
        keep_state: impl Fn(StateId) -> bool,
        keep_edge: impl Fn(StateId, Letter) -> bool,
    ) -> LayeredAutomaton {
        assert_eq!(initial.layer, 1);
        let d = self.depth();
        let mut new_index: Vec<Vec<Option<usize>>> = Vec::with_capacity(d);
        for x in 1..=d {
            let mut idx = vec![None; self.layer_len(x)];
            let mut next = 0;
            for s in self.layer_states(x) {
                let parent_kept = match self.parent(s) {
                    None => true,
                    Some(p) => new_index[x - 2][p.index].is_some(),
                };
                if parent_kept && keep_state(s) {
                    idx[s.index] = Some(next);
                    next += 1;
                }
            }
            new_index.push(idx);
        }
        let mut b = LayeredBuilder::new(self.alphabet.clone());
        for x in 1..=d {
            for s in self.layer_states(x) {
                if new_index[x - 1][s.index].is_some() {
                    let parent = self.parent(s).map(|p| new_index[x - 2][p.index].unwrap());
                    b.push_state(x, self.name(s).to_string(), parent);
                }
            }
        }
        for x in 1..=d {
            for s in self.layer_states(x) {
                let Some(ns) = new_index[x - 1][s.index] else { continue };
                for a in self.alphabet.iter() {
                    if let Some(t) = self.succ(s, a) {
                        if let Some(nt) = new_index[x - 1][t.index] {
                            if keep_edge(s, a) {
                                b.set_transition(StateId::new(x, ns), a, nt);
                            }
                        }
                    }
                }
            }
        }
        let init = new_index[0][initial.index].expect("initial state must be kept");
        b.set_initial_index(init);
        b.build().expect("restriction of a well-formed automaton is well formed")
    }

    /// Drops layer-1 states unreachable from the initial state and everything below them.
    pub fn trim(&self) -> LayeredAutomaton {
        let reach = self.reachable_layer1();
        let root = |s: StateId| self.ancestor(s, 1);
        self.restrict(self.initial(), |s| reach[root(s).index], |_, _| true)
    }

    /// The automaton with initial state `q` (layer 1), trimmed to the reachable part.
    pub fn reroot(&self, q: StateId) -> Result<LayeredAutomaton> {
        if q.layer != 1 || !self.contains(q) {
            return Err(Error::Domain("re-rooting needs a layer-1 state".into()));
        }
        let moved = self.restrict(q, |_| true, |_, _| true);
        Ok(moved.trim())
    }

    /// Renames every state with `f`; structure is unchanged.
    pub fn rename(&self, mut f: impl FnMut(StateId, &str) -> String) -> LayeredAutomaton {
        let mut out = self.clone();
        for x in 1..=self.depth() {
            for i in 0..self.layer_len(x) {
                let s = StateId::new(x, i);
                out.layers[x - 1].names[i] = f(s, self.name(s));
            }
        }
        out
    }
}

impl fmt::Debug for LayeredAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LayeredAutomaton over {:?}, initial {}", self.alphabet, self.name(self.initial()))?;
        for x in 1..=self.depth() {
            writeln!(f, "  layer {x}:")?;
            for s in self.layer_states(x) {
                write!(f, "    {}", self.name(s))?;
                if let Some(p) = self.parent(s) {
                    write!(f, " (under {})", self.name(p))?;
                }
                for a in self.alphabet.iter() {
                    if let Some(t) = self.succ(s, a) {
                        write!(f, " {}→{}", self.alphabet.symbol(a), self.name(t))?;
                    }
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Incremental construction of a [`LayeredAutomaton`].
///
/// The builder only enforces what is needed to represent the automaton (known names, parents
/// on the previous layer, an initial state). Semantic invariants are checked by
/// [`LayeredAutomaton::validate`].
#[derive(Clone, Debug)]
pub struct LayeredBuilder {
    alphabet: Alphabet,
    layers: Vec<BuilderLayer>,
    initial: Option<usize>,
    conflicts: Vec<Conflict>,
}

#[derive(Clone, Debug, Default)]
struct BuilderLayer {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    delta: Vec<Vec<Option<usize>>>,
}

impl LayeredBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        LayeredBuilder {
            alphabet,
            layers: Vec::new(),
            initial: None,
            conflicts: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn ensure_layer(&mut self, x: usize) {
        while self.layers.len() < x {
            self.layers.push(BuilderLayer::default());
        }
    }

    /// Adds an empty layer on top (so that documents may declare empty layers).
    pub fn add_layer(&mut self) -> usize {
        self.layers.push(BuilderLayer::default());
        self.layers.len()
    }

    /// Adds a state on layer `x` with the given parent (an id of layer `x - 1`).
    pub fn add_state(&mut self, x: usize, name: &str, parent: Option<&str>) -> Result<StateId> {
        if x == 0 {
            return Err(Error::Domain("layers are numbered from 1".into()));
        }
        let parent_index = match (x, parent) {
            (1, None) => None,
            (1, Some(_)) => {
                return Err(Error::Domain(format!("layer-1 state `{name}` cannot have a parent")))
            }
            (_, None) => {
                return Err(Error::Domain(format!("state `{name}` on layer {x} needs a parent")))
            }
            (_, Some(p)) => {
                let idx = self
                    .layers
                    .get(x - 2)
                    .and_then(|l| l.index.get(p))
                    .copied()
                    .ok_or_else(|| {
                        Error::Domain(format!("parent `{p}` of `{name}` is not a state of layer {}", x - 1))
                    })?;
                Some(idx)
            }
        };
        self.ensure_layer(x);
        if self.layers[x - 1].index.contains_key(name) {
            return Err(Error::Domain(format!("duplicate state id `{name}` on layer {x}")));
        }
        Ok(self.push_state(x, name.to_string(), parent_index))
    }

    /// Index-based variant of [`LayeredBuilder::add_state`]; duplicate names are not checked.
    pub fn push_state(&mut self, x: usize, name: String, parent: Option<usize>) -> StateId {
        assert!(x >= 1);
        assert_eq!(x == 1, parent.is_none(), "exactly the states above layer 1 have parents");
        self.ensure_layer(x);
        let k = self.alphabet.len();
        let layer = &mut self.layers[x - 1];
        let idx = layer.names.len();
        layer.index.entry(name.clone()).or_insert(idx);
        layer.names.push(name);
        layer.parent.push(parent);
        layer.delta.push(vec![None; k]);
        StateId::new(x, idx)
    }

    pub fn add_transition(&mut self, x: usize, from: &str, symbol: &str, to: &str) -> Result<()> {
        let a = self.alphabet.letter_or_err(symbol)?;
        let layer = self
            .layers
            .get(x.wrapping_sub(1))
            .ok_or_else(|| Error::Domain(format!("no layer {x}")))?;
        let lookup = |n: &str| {
            layer
                .index
                .get(n)
                .copied()
                .ok_or_else(|| Error::Domain(format!("`{n}` is not a state of layer {x}")))
        };
        let (f, t) = (lookup(from)?, lookup(to)?);
        self.set_transition(StateId::new(x, f), a, t);
        Ok(())
    }

    /// Sets `δ_x(from, a) = to`. A second, different target is recorded as a determinism
    /// violation.
    pub fn set_transition(&mut self, from: StateId, a: Letter, to: usize) {
        let slot = &mut self.layers[from.layer - 1].delta[from.index][a];
        match *slot {
            None => *slot = Some(to),
            Some(t) if t == to => {}
            Some(_) => self.conflicts.push(Conflict {
                state: from,
                letter: a,
                target: to,
            }),
        }
    }

    pub fn set_initial(&mut self, name: &str) -> Result<()> {
        let idx = self
            .layers
            .first()
            .and_then(|l| l.index.get(name))
            .copied()
            .ok_or_else(|| Error::Domain(format!("initial state `{name}` is not a layer-1 state")))?;
        self.initial = Some(idx);
        Ok(())
    }

    pub fn set_initial_index(&mut self, index: usize) {
        self.initial = Some(index);
    }

    pub fn build(self) -> Result<LayeredAutomaton> {
        if self.layers.is_empty() || self.layers[0].names.is_empty() {
            return Err(Error::Domain("a layered automaton needs at least one layer-1 state".into()));
        }
        let initial = self
            .initial
            .ok_or_else(|| Error::Domain("no initial state".into()))?;
        if initial >= self.layers[0].names.len() {
            return Err(Error::Domain("initial state out of range".into()));
        }
        let d = self.layers.len();
        let mut layers: Vec<Layer> = Vec::with_capacity(d);
        for (i, bl) in self.layers.into_iter().enumerate() {
            let parent: Vec<usize> = if i == 0 {
                Vec::new()
            } else {
                bl.parent.iter().map(|p| p.expect("parent present")).collect()
            };
            layers.push(Layer {
                children: vec![Vec::new(); bl.names.len()],
                names: bl.names,
                delta: bl.delta,
                parent,
            });
        }
        for x in 1..d {
            let (lower, upper) = layers.split_at_mut(x);
            for (c, &p) in upper[0].parent.iter().enumerate() {
                lower[x - 1].children[p].push(c);
            }
        }
        Ok(LayeredAutomaton {
            alphabet: self.alphabet,
            layers,
            initial,
            conflicts: self.conflicts,
        })
    }
}
