//! Runs of `sem(A)` resolved by longest-suffix resolvers or uniformly at random.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Letter;
use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, StateId};
use crate::word::UpWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Resolves odd priorities.
    Eve,
    /// Resolves even priorities.
    Adam,
}

impl Side {
    pub fn for_priority(p: u32) -> Side {
        if p % 2 == 1 {
            Side::Eve
        } else {
            Side::Adam
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    LongestSuffix,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub state: StateId,
    pub letter: Letter,
    pub priority: u32,
    pub successor: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub start: StateId,
    pub steps: Vec<Step>,
    pub seed: Option<u64>,
    pub horizon: usize,
}

impl RunTrace {
    pub fn empty(start: StateId) -> Self {
        RunTrace {
            start,
            steps: Vec::new(),
            seed: None,
            horizon: 0,
        }
    }

    pub fn current(&self) -> StateId {
        self.steps.last().map_or(self.start, |s| s.successor)
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.steps.iter().map(|s| s.letter).collect()
    }

    /// Least priority among the steps of the final third.
    pub fn tail_min(&self) -> Option<u32> {
        let from = self.steps.len() * 2 / 3;
        self.steps[from..].iter().map(|s| s.priority).min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub priority_counts: BTreeMap<u32, usize>,
    pub tail_min: Option<u32>,
}

impl RunStats {
    pub fn of(trace: &RunTrace) -> Self {
        let mut priority_counts = BTreeMap::new();
        for s in &trace.steps {
            *priority_counts.entry(s.priority).or_insert(0) += 1;
        }
        RunStats {
            priority_counts,
            tail_min: trace.tail_min(),
        }
    }
}

/// For every layer `y ≥ 2` and state `t` of `T_y`, the length of the longest suffix of the word
/// read so far labelling a `T_y`-path that ends in `t`. The empty suffix always qualifies.
#[derive(Clone, Debug)]
pub struct SuffixTracker {
    len: Vec<Vec<usize>>,
}

impl SuffixTracker {
    pub fn new(a: &LayeredAutomaton) -> Self {
        SuffixTracker {
            len: (1..=a.depth()).map(|x| vec![0; a.layer_len(x)]).collect(),
        }
    }

    pub fn push(&mut self, a: &LayeredAutomaton, l: Letter) {
        for x in 2..=a.depth() {
            let old = &self.len[x - 1];
            let mut new = vec![0; old.len()];
            for t in a.layer_states(x) {
                if let Some(t2) = a.succ(t, l) {
                    new[t2.index] = new[t2.index].max(old[t.index] + 1);
                }
            }
            self.len[x - 1] = new;
        }
    }

    pub fn longest(&self, t: StateId) -> usize {
        self.len[t.layer - 1][t.index]
    }
}

/// Pending action of `sem(A)` from leaf `q` on `l`: its priority and the candidate successors.
fn action(a: &LayeredAutomaton, q: StateId, l: Letter) -> (usize, Vec<StateId>) {
    let x = a.action_layer(q, l);
    let target = a.succ(a.ancestor(q, x), l).expect("T_1 is complete");
    (x, a.leaves_under(target))
}

/// One move of the longest-suffix resolver of `side` after `history`, reading `s`. The suffix is
/// measured on `init_word` followed by the letters of `history` and `s`.
pub fn resolver_step(
    a: &LayeredAutomaton,
    history: &RunTrace,
    s: Letter,
    side: Side,
    init_word: &[Letter],
) -> Result<StateId> {
    if s >= a.alphabet().len() {
        return Err(Error::Domain(format!("letter {s} outside the alphabet")));
    }
    let q = history.current();
    let (x, candidates) = action(a, q, s);
    if Side::for_priority(x as u32) != side {
        return Err(Error::Domain(format!(
            "action of priority {x} from `{}` is resolved by {:?}",
            a.name(q),
            Side::for_priority(x as u32)
        )));
    }
    let mut tracker = SuffixTracker::new(a);
    for &l in init_word.iter().chain(history.letters().iter()).chain([s].iter()) {
        tracker.push(a, l);
    }
    Ok(choose_longest(a, &tracker, x, &candidates))
}

/// Longest-suffix choice among `candidates` for an action of priority `x`: the candidate whose
/// layer-`(x + 1)` ancestor is reached by the longest suffix, least state on ties. Leaves on
/// layer `x` itself have no such ancestor and rank below all others.
fn choose_longest(a: &LayeredAutomaton, tracker: &SuffixTracker, x: usize, candidates: &[StateId]) -> StateId {
    let mut best = candidates[0];
    let mut best_score = i64::MIN;
    for &c in candidates {
        let score = if c.layer > x {
            tracker.longest(a.ancestor(c, x + 1)) as i64
        } else {
            -1
        };
        if score > best_score {
            best = c;
            best_score = score;
        }
    }
    best
}

/// Simulates `horizon` steps of `sem(A)` on `w` from the least admissible leaf, resolving Eve's
/// and Adam's choices by the given policies. A seed is required when some policy is random.
pub fn simulate_run(
    a: &LayeredAutomaton,
    w: &UpWord,
    eve: Policy,
    adam: Policy,
    horizon: usize,
    seed: Option<u64>,
) -> Result<(RunTrace, RunStats)> {
    a.ensure_valid()?;
    w.check_alphabet(a.alphabet().len())?;
    if horizon < w.positions() {
        return Err(Error::Domain(format!(
            "horizon {horizon} shorter than prefix plus period ({})",
            w.positions()
        )));
    }
    let random = eve == Policy::Random || adam == Policy::Random;
    let mut rng = match (random, seed) {
        (true, None) => return Err(Error::Domain("a random policy needs a seed".into())),
        (_, s) => ChaCha8Rng::seed_from_u64(s.unwrap_or(0)),
    };
    let start = a.leaves_under(a.initial())[0];
    let mut trace = RunTrace {
        start,
        steps: Vec::with_capacity(horizon),
        seed,
        horizon,
    };
    let mut tracker = SuffixTracker::new(a);
    let mut q = start;
    let mut pos = 0;
    for _ in 0..horizon {
        let l = w.letter_at(pos);
        pos = w.next(pos);
        tracker.push(a, l);
        let (x, candidates) = action(a, q, l);
        let policy = match Side::for_priority(x as u32) {
            Side::Eve => eve,
            Side::Adam => adam,
        };
        let next = if candidates.len() == 1 {
            candidates[0]
        } else {
            match policy {
                Policy::LongestSuffix => choose_longest(a, &tracker, x, &candidates),
                Policy::Random => *candidates.choose(&mut rng).expect("non-empty"),
            }
        };
        trace.steps.push(Step {
            state: q,
            letter: l,
            priority: x as u32,
            successor: next,
        });
        q = next;
    }
    let stats = RunStats::of(&trace);
    Ok((trace, stats))
}
