//! Bundled example automata, generators and direct language predicates for the example
//! languages.
//!
//! * L1 over {a, b, c}: finitely many `cc` and infinitely many `aa`.
//! * L2 over {a, b}: `(Σ²)*(aa + bb)^ω`.
//! * L3 over {a, b}: `aba` occurs finitely often, and `a` and `b` both occur infinitely often.
//! * L4 over {a, b, c}: some letter occurs only finitely often.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Letter};
use crate::alternating::AlternatingAutomaton;
use crate::dpa::Dpa;
use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, LayeredBuilder, StateId};
use crate::word::UpWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureLanguage {
    L1,
    L2,
    L3,
    L4,
}

impl FixtureLanguage {
    pub const ALL: [FixtureLanguage; 4] = [Self::L1, Self::L2, Self::L3, Self::L4];

    pub fn alphabet(self) -> Alphabet {
        match self {
            Self::L1 | Self::L4 => Alphabet::letters(3),
            Self::L2 | Self::L3 => Alphabet::letters(2),
        }
    }

    pub fn dpa(self) -> Dpa {
        match self {
            Self::L1 => l1_dpa(),
            Self::L2 => l2_dpa(),
            Self::L3 => l3_dpa(),
            Self::L4 => l4_dpa(),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "L1" | "l1" => Ok(Self::L1),
            "L2" | "l2" => Ok(Self::L2),
            "L3" | "l3" => Ok(Self::L3),
            "L4" | "l4" => Ok(Self::L4),
            _ => Err(Error::Domain(format!("unknown fixture language `{name}`"))),
        }
    }
}

type Table = &'static [&'static [(usize, u32)]];

fn dpa_from(symbols: usize, names: &[&str], table: Table, d: u32) -> Dpa {
    Dpa::new(
        Alphabet::letters(symbols),
        names.iter().map(|s| s.to_string()).collect(),
        0,
        table.iter().map(|row| row.to_vec()).collect(),
        d,
    )
    .expect("bundled DPA is valid")
}

/// States remember the last letter (`B` also at the start): `c` after `c` has priority 1, `a`
/// after `a` priority 2, everything else 3.
pub fn l1_dpa() -> Dpa {
    // letters a, b, c
    dpa_from(
        3,
        &["B", "A", "C"],
        &[
            &[(1, 3), (0, 3), (2, 3)],
            &[(1, 2), (0, 3), (2, 3)],
            &[(1, 3), (0, 3), (2, 1)],
        ],
        3,
    )
}

/// Four states: position parity, the letter at odd positions, and a copy `X` of the even state
/// entered after a mismatched pair.
pub fn l2_dpa() -> Dpa {
    dpa_from(
        2,
        &["E", "Oa", "Ob", "X"],
        &[
            &[(1, 2), (2, 2)],
            &[(0, 2), (3, 1)],
            &[(3, 1), (0, 2)],
            &[(1, 2), (2, 2)],
        ],
        2,
    )
}

/// Three-state DPA for L2, equivalent to [`l2_dpa`].
pub fn l2_alt_dpa() -> Dpa {
    dpa_from(
        2,
        &["E", "Oa", "Ob"],
        &[&[(1, 2), (2, 2)], &[(0, 2), (0, 1)], &[(0, 1), (0, 2)]],
        2,
    )
}

/// Tracks progress towards `aba` and the previous letter: completing `aba` has priority 1, a
/// change of letter priority 2, repeating a letter priority 3.
pub fn l3_dpa() -> Dpa {
    dpa_from(
        2,
        &["S", "A1", "B0", "B2"],
        &[
            &[(1, 3), (2, 3)],
            &[(1, 3), (3, 2)],
            &[(1, 2), (2, 3)],
            &[(1, 1), (2, 3)],
        ],
        3,
    )
}

/// States are the proper subsets of {a, b, c} seen since the last reset; seeing all three
/// letters resets with priority 1, every other step has priority 2.
pub fn l4_dpa() -> Dpa {
    let sets: Vec<u8> = vec![0, 1, 2, 4, 3, 5, 6];
    let name = |s: u8| -> String {
        if s == 0 {
            "{}".to_string()
        } else {
            let letters: String = ['a', 'b', 'c']
                .iter()
                .enumerate()
                .filter(|(i, _)| s & (1 << i) != 0)
                .map(|(_, c)| *c)
                .collect();
            format!("{{{letters}}}")
        }
    };
    let index = |s: u8| sets.iter().position(|&t| t == s).unwrap();
    let delta = sets
        .iter()
        .map(|&s| {
            (0..3)
                .map(|l| {
                    let t = s | (1 << l);
                    if t == 7 {
                        (index(0), 1)
                    } else {
                        (index(t), 2)
                    }
                })
                .collect()
        })
        .collect();
    Dpa::new(Alphabet::letters(3), sets.iter().map(|&s| name(s)).collect(), 0, delta, 2)
        .expect("bundled DPA is valid")
}

/// One state over {1, …, d}; letter `x` loops with priority `x`.
pub fn gen_parity(d: u32) -> Result<Dpa> {
    if d == 0 {
        return Err(Error::Domain("d must be at least 1".into()));
    }
    let alphabet = Alphabet::new((1..=d).map(|x| x.to_string()))?;
    Dpa::new(alphabet, vec!["s".into()], 0, vec![(1..=d).map(|x| (0, x)).collect()], d)
}

/// Hand-built layered automaton for L1: root `r`; on layer 2 `p` (last letter `c`) and `q`;
/// on layer 3 `p1` below `p` and `q1` (last letter `a`), `q2` below `q`.
pub fn l1_layered() -> LayeredAutomaton {
    let mut b = LayeredBuilder::new(Alphabet::letters(3));
    let add = |b: &mut LayeredBuilder, x, n, p| {
        b.add_state(x, n, p).expect("fixture");
    };
    add(&mut b, 1, "r", None);
    add(&mut b, 2, "p", Some("r"));
    add(&mut b, 2, "q", Some("r"));
    add(&mut b, 3, "p1", Some("p"));
    add(&mut b, 3, "q1", Some("q"));
    add(&mut b, 3, "q2", Some("q"));
    let edges: &[(usize, &str, &str, &str)] = &[
        (1, "r", "a", "r"),
        (1, "r", "b", "r"),
        (1, "r", "c", "r"),
        (2, "q", "a", "q"),
        (2, "q", "b", "q"),
        (2, "q", "c", "p"),
        (2, "p", "a", "q"),
        (2, "p", "b", "q"),
        (3, "q2", "a", "q1"),
        (3, "q2", "b", "q2"),
        (3, "q2", "c", "p1"),
        (3, "q1", "b", "q2"),
        (3, "q1", "c", "p1"),
        (3, "p1", "a", "q1"),
        (3, "p1", "b", "q2"),
    ];
    for &(x, f, s, t) in edges {
        b.add_transition(x, f, s, t).expect("fixture");
    }
    b.set_initial("r").expect("fixture");
    b.build().expect("fixture")
}

/// Alphabet `a1..ak, b1..bk, c`; root `e` loops on everything; on layer `x ≥ 2` the state `ax`
/// loops on `{ax, …, ak, c}` and `bx` on `{bx, …, bk, c}`, with parents `a(x-1)` and `b(x-1)`
/// (`e` for `a2`, `b2`).
pub fn gen_two_strand(k: usize) -> Result<LayeredAutomaton> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut symbols: Vec<String> = Vec::new();
    for s in ["a", "b"] {
        symbols.extend((1..=k).map(|i| format!("{s}{i}")));
    }
    symbols.push("c".into());
    let alphabet = Alphabet::new(symbols)?;
    let mut b = LayeredBuilder::new(alphabet.clone());
    b.add_state(1, "e", None)?;
    for sym in alphabet.symbols() {
        b.add_transition(1, "e", sym, "e")?;
    }
    for x in 2..=k + 1 {
        for s in ["a", "b"] {
            let parent = if x == 2 { "e".to_string() } else { format!("{s}{}", x - 1) };
            let name = format!("{s}{x}");
            b.add_state(x, &name, Some(&parent))?;
            for i in x..=k {
                b.add_transition(x, &name, &format!("{s}{i}"), &name)?;
            }
            b.add_transition(x, &name, "c", &name)?;
        }
    }
    b.set_initial("e")?;
    b.build()
}

/// Root `r` over {a, b} with children `p` (loops on `a`) and `q` (loops on `a`, `b`); `q` has a
/// child `t` looping on `a`, `b`. The word `a^ω` is strongly accepted by `p` and strongly
/// rejected by `t`.
pub fn inconsistent_fixture() -> LayeredAutomaton {
    let mut b = LayeredBuilder::new(Alphabet::letters(2));
    b.add_state(1, "r", None).unwrap();
    b.add_state(2, "p", Some("r")).unwrap();
    b.add_state(2, "q", Some("r")).unwrap();
    b.add_state(3, "t", Some("q")).unwrap();
    for (x, f, s, t) in [
        (1, "r", "a", "r"),
        (1, "r", "b", "r"),
        (2, "p", "a", "p"),
        (2, "q", "a", "q"),
        (2, "q", "b", "q"),
        (3, "t", "a", "t"),
        (3, "t", "b", "t"),
    ] {
        b.add_transition(x, f, s, t).unwrap();
    }
    b.set_initial("r").unwrap();
    b.build().unwrap()
}

/// Five-layer automaton over {a, b, c} in which the SCC `{p2}` is covered by its child SCC
/// `{p3}`; every state is a self-loop.
///
/// Layer 1: `p1` (a, b, c). Layer 2: `p2` (a, b), `q2` (c). Layer 3: `p3` (a, b), `r3` (b),
/// both below `p2`. Layer 4: `p4` (a), `q4` (b) below `p3`, `r4` (b) below `r3`. Layer 5: `q5`
/// (b) below `q4`, `r5` (b) below `r4`.
pub fn lowering_fixture() -> LayeredAutomaton {
    let mut b = LayeredBuilder::new(Alphabet::letters(3));
    let states: &[(usize, &str, Option<&str>, &[&str])] = &[
        (1, "p1", None, &["a", "b", "c"]),
        (2, "p2", Some("p1"), &["a", "b"]),
        (2, "q2", Some("p1"), &["c"]),
        (3, "p3", Some("p2"), &["a", "b"]),
        (3, "r3", Some("p2"), &["b"]),
        (4, "p4", Some("p3"), &["a"]),
        (4, "q4", Some("p3"), &["b"]),
        (4, "r4", Some("r3"), &["b"]),
        (5, "q5", Some("q4"), &["b"]),
        (5, "r5", Some("r4"), &["b"]),
    ];
    for &(x, n, p, loops) in states {
        b.add_state(x, n, p).unwrap();
        for l in loops {
            b.add_transition(x, n, l, n).unwrap();
        }
    }
    b.set_initial("p1").unwrap();
    b.build().unwrap()
}

/// Two-state coBüchi automaton for "finitely many `cc`" over {a, b, c}: `s0` (last letter not
/// `c`) and `s1`; every transition has priority 2 except `c` from `s1`, which has priority 1
/// and leads to both states.
pub fn cobuchi_finitely_many_cc() -> AlternatingAutomaton {
    let mut b = AlternatingAutomaton::new(Alphabet::letters(3), vec!["s0".into(), "s1".into()], 0).unwrap();
    for q in 0..2 {
        b.add_transition(q, 0, 2, 0);
        b.add_transition(q, 1, 2, 0);
    }
    b.add_transition(0, 2, 2, 1);
    b.add_transition(1, 2, 1, 0);
    b.add_transition(1, 2, 1, 1);
    b
}

/// Random complete DPA with states `q0, q1, …`, letters `a, b, …` and priorities in
/// `[1, max_priority]`; initial state `q0`. Deterministic in the seed.
pub fn gen_random_dpa(seed: u64, states: usize, alphabet_size: usize, max_priority: u32) -> Result<Dpa> {
    if states == 0 || alphabet_size == 0 || max_priority == 0 {
        return Err(Error::Domain("parameters must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = (0..states)
        .map(|_| {
            (0..alphabet_size)
                .map(|_| (rng.gen_range(0..states), rng.gen_range(1..=max_priority)))
                .collect()
        })
        .collect();
    Dpa::new(
        Alphabet::letters(alphabet_size),
        (0..states).map(|i| format!("q{i}")).collect(),
        0,
        delta,
        max_priority,
    )
}

/// Random valid layered automaton (not necessarily consistent): `width` states per layer, each
/// state above layer 1 with a random parent, and each transition allowed by the morphism
/// condition present with probability 2/3.
pub fn gen_random_layered(seed: u64, depth: usize, width: usize, alphabet_size: usize) -> Result<LayeredAutomaton> {
    if depth == 0 || width == 0 || alphabet_size == 0 {
        return Err(Error::Domain("parameters must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = LayeredBuilder::new(Alphabet::letters(alphabet_size));
    let mut parents: Vec<Vec<usize>> = vec![Vec::new()];
    for x in 1..=depth {
        let mut ps = Vec::new();
        for i in 0..width {
            let parent = (x > 1).then(|| rng.gen_range(0..width));
            b.push_state(x, format!("s{x}_{i}"), parent);
            ps.push(parent.unwrap_or(0));
        }
        parents.push(ps);
    }
    // delta per layer, built bottom-up so that the morphism condition can be respected
    let mut delta: Vec<Vec<Vec<Option<usize>>>> = vec![Vec::new()];
    for x in 1..=depth {
        let mut layer = vec![vec![None; alphabet_size]; width];
        for (i, row) in layer.iter_mut().enumerate() {
            for (l, slot) in row.iter_mut().enumerate() {
                if x == 1 {
                    *slot = Some(rng.gen_range(0..width));
                    continue;
                }
                let Some(pt) = delta[x - 1][parents[x][i]][l] else { continue };
                let options: Vec<usize> = (0..width).filter(|&j| parents[x][j] == pt).collect();
                if !options.is_empty() && rng.gen_range(0..3) < 2 {
                    *slot = Some(options[rng.gen_range(0..options.len())]);
                }
            }
        }
        delta.push(layer);
    }
    for (x, layer) in delta.iter().enumerate().skip(1) {
        for (i, row) in layer.iter().enumerate() {
            for (l, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    b.set_transition(StateId::new(x, i), l, *t);
                }
            }
        }
    }
    b.set_initial_index(0);
    Ok(b.build()?.trim())
}

/// Adds a copy of state `q` with the same outgoing transitions and redirects to it the
/// transitions into `q` from states with an odd index. The language is unchanged.
pub fn duplicate_state(d: &Dpa, q: usize) -> Dpa {
    let n = d.len();
    let mut names = d.names().to_vec();
    let mut copy = format!("{}'", d.name(q));
    while names.contains(&copy) {
        copy.push('\'');
    }
    names.push(copy);
    let mut delta: Vec<Vec<(usize, u32)>> = (0..n)
        .map(|s| {
            d.alphabet()
                .iter()
                .map(|l| {
                    let (t, p) = d.step(s, l);
                    if t == q && s % 2 == 1 {
                        (n, p)
                    } else {
                        (t, p)
                    }
                })
                .collect()
        })
        .collect();
    delta.push(d.alphabet().iter().map(|l| d.step(q, l)).collect());
    Dpa::new(d.alphabet().clone(), names, d.initial(), delta, d.max_priority()).expect("valid copy")
}

/// Adds `extra` unreachable states pointing into the original automaton.
pub fn pad_unreachable(d: &Dpa, extra: usize) -> Dpa {
    let n = d.len();
    let mut names = d.names().to_vec();
    let mut delta: Vec<Vec<(usize, u32)>> = (0..n).map(|s| d.alphabet().iter().map(|l| d.step(s, l)).collect()).collect();
    for i in 0..extra {
        names.push(format!("pad{i}"));
        delta.push(
            d.alphabet()
                .iter()
                .map(|l| ((i + l) % (n + i + 1), 1 + (l as u32 % d.max_priority())))
                .collect(),
        );
    }
    Dpa::new(d.alphabet().clone(), names, d.initial(), delta, d.max_priority()).expect("valid padding")
}

/// Whether the factor `f` occurs infinitely often in `u·v^ω`.
fn recurs(v: &[Letter], f: &[Letter]) -> bool {
    (0..v.len()).any(|i| f.iter().enumerate().all(|(j, &c)| v[(i + j) % v.len()] == c))
}

/// Direct membership test for the example languages (letters `a = 0`, `b = 1`, `c = 2`).
pub fn fixture_oracle(lang: FixtureLanguage, w: &UpWord) -> Result<bool> {
    w.check_alphabet(lang.alphabet().len())?;
    let v = w.period();
    let occurs = |l: Letter| v.contains(&l);
    Ok(match lang {
        FixtureLanguage::L1 => !recurs(v, &[2, 2]) && recurs(v, &[0, 0]),
        FixtureLanguage::L2 => {
            // Pairs at even positions from the end of the prefix on, over two periods.
            let start = w.prefix().len() + w.prefix().len() % 2;
            (start..start + 2 * v.len())
                .step_by(2)
                .all(|i| w.letter_at(i) == w.letter_at(i + 1))
        }
        FixtureLanguage::L3 => !recurs(v, &[0, 1, 0]) && occurs(0) && occurs(1),
        FixtureLanguage::L4 => !(occurs(0) && occurs(1) && occurs(2)),
    })
}
