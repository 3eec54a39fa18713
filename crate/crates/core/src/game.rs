//! Two-player games on finite edge-coloured arenas.
//!
//! Prover plays the role of Eve, Refuter the role of Adam. Winning conditions are defined on
//! edges: Büchi sets are given by mark bits, parity by an edge priority (min-parity).

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Player {
    Prover,
    Refuter,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Prover => Player::Refuter,
            Player::Refuter => Player::Prover,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Condition {
    /// Prover wins iff edges marked with bit 0 are taken infinitely often.
    Buchi,
    /// Prover wins iff for each of the `k` bits, an edge carrying it is taken infinitely often.
    GeneralizedBuchi(usize),
    /// Prover wins iff the least priority taken infinitely often is even.
    Parity,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub priority: u32,
    pub marks: u64,
}

#[derive(Clone, Debug)]
pub struct GameArena {
    condition: Condition,
    owner: Vec<Player>,
    sink: Vec<Option<Player>>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

impl GameArena {
    pub fn new(condition: Condition) -> Self {
        GameArena {
            condition,
            owner: Vec::new(),
            sink: Vec::new(),
            edges: Vec::new(),
            out: Vec::new(),
        }
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn add_vertex(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.sink.push(None);
        self.out.push(Vec::new());
        self.owner.len() - 1
    }

    /// A vertex without moves whose winner is fixed.
    pub fn add_sink(&mut self, winner: Player) -> usize {
        let v = self.add_vertex(winner);
        self.sink[v] = Some(winner);
        v
    }

    /// Turns an existing vertex without edges into a sink.
    pub fn make_sink(&mut self, v: usize, winner: Player) {
        self.sink[v] = Some(winner);
    }

    pub fn add_edge(&mut self, from: usize, to: usize, priority: u32, marks: u64) {
        self.out[from].push(self.edges.len());
        self.edges.push(Edge {
            from,
            to,
            priority,
            marks,
        });
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn sink_winner(&self, v: usize) -> Option<Player> {
        self.sink[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.out[v].iter().map(move |&e| &self.edges[e])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_count();
        for (v, outs) in self.out.iter().enumerate() {
            match (self.sink[v], outs.is_empty()) {
                (None, true) => return Err(Error::Arena(format!("vertex {v} is a dead end"))),
                (Some(_), false) => return Err(Error::Arena(format!("sink {v} has outgoing edges"))),
                _ => {}
            }
        }
        let sets = match self.condition {
            Condition::Buchi => 1,
            Condition::GeneralizedBuchi(k) => k,
            Condition::Parity => 64,
        };
        if sets > 64 {
            return Err(Error::Arena("at most 64 Büchi sets are supported".into()));
        }
        for e in &self.edges {
            if e.from >= n || e.to >= n {
                return Err(Error::Arena("edge endpoint out of range".into()));
            }
            if sets < 64 && e.marks >> sets != 0 {
                return Err(Error::Arena("edge mark outside the declared Büchi sets".into()));
            }
        }
        Ok(())
    }
}

/// Winning regions; every vertex is won by exactly one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegions {
    prover: Vec<bool>,
}

impl WinningRegions {
    pub fn winner(&self, v: usize) -> Player {
        if self.prover[v] {
            Player::Prover
        } else {
            Player::Refuter
        }
    }

    pub fn prover_wins(&self, v: usize) -> bool {
        self.prover[v]
    }

    pub fn prover_region(&self) -> Vec<usize> {
        (0..self.prover.len()).filter(|&v| self.prover[v]).collect()
    }

    pub fn refuter_region(&self) -> Vec<usize> {
        (0..self.prover.len()).filter(|&v| !self.prover[v]).collect()
    }
}

/// Dispatches on the arena's condition.
pub fn solve(g: &GameArena) -> Result<WinningRegions> {
    match g.condition {
        Condition::Buchi => solve_buchi(g),
        Condition::GeneralizedBuchi(_) => solve_generalized_buchi(g),
        Condition::Parity => solve_parity(g),
    }
}

/// The arena with sinks turned into self-loops: a Prover sink loop satisfies every condition,
/// a Refuter sink loop none.
struct Normalized {
    owner: Vec<Player>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

fn normalize(g: &GameArena) -> Normalized {
    let mut edges = g.edges.clone();
    for (v, s) in g.sink.iter().enumerate() {
        match s {
            Some(Player::Prover) => edges.push(Edge {
                from: v,
                to: v,
                priority: 0,
                marks: u64::MAX,
            }),
            Some(Player::Refuter) => edges.push(Edge {
                from: v,
                to: v,
                priority: 1,
                marks: 0,
            }),
            None => {}
        }
    }
    let n = g.vertex_count();
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        out[e.from].push(i);
        inc[e.to].push(i);
    }
    Normalized {
        owner: g.owner.clone(),
        edges,
        out,
        inc,
    }
}

fn expect_condition(g: &GameArena, ok: bool, name: &str) -> Result<()> {
    if !ok {
        return Err(Error::Arena(format!("arena condition {:?} is not {name}", g.condition)));
    }
    g.validate()
}

pub fn solve_buchi(g: &GameArena) -> Result<WinningRegions> {
    expect_condition(g, g.condition == Condition::Buchi, "Büchi")?;
    let norm = normalize(g);
    Ok(WinningRegions {
        prover: generalized_buchi_core(&norm, 1),
    })
}

pub fn solve_generalized_buchi(g: &GameArena) -> Result<WinningRegions> {
    let k = match g.condition {
        Condition::GeneralizedBuchi(k) => k,
        _ => {
            return Err(Error::Arena(format!(
                "arena condition {:?} is not generalized Büchi",
                g.condition
            )))
        }
    };
    expect_condition(g, true, "generalized Büchi")?;
    let norm = normalize(g);
    if k == 0 {
        // no obligation: Prover only has to avoid Refuter sinks, a Büchi game on every edge
        // except the Refuter sink loops
        let mut all = norm;
        let original = g.edges.len();
        for (i, e) in all.edges.iter_mut().enumerate() {
            let refuter_loop = i >= original && g.sink[e.from] == Some(Player::Refuter);
            e.marks = if refuter_loop { 0 } else { 1 };
        }
        return Ok(WinningRegions {
            prover: generalized_buchi_core(&all, 1),
        });
    }
    Ok(WinningRegions {
        prover: generalized_buchi_core(&norm, k),
    })
}

/// `νZ. ⋂_i μY. CPre((F_i ∧ target ∈ Z) ∨ target ∈ Y)`, each inner fixpoint computed as a
/// linear-time attractor over edges.
fn generalized_buchi_core(g: &Normalized, k: usize) -> Vec<bool> {
    let n = g.owner.len();
    let mut z = vec![true; n];
    loop {
        let mut next = vec![true; n];
        for i in 0..k {
            let bit = 1u64 << i;
            let y = edge_attractor(g, |e| g.edges[e].marks & bit != 0 && z[g.edges[e].to]);
            for v in 0..n {
                next[v] &= y[v];
            }
        }
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Vertices from which Prover can force taking an edge satisfying `good`, or reaching a vertex
/// already in the attractor.
fn edge_attractor(g: &Normalized, good: impl Fn(usize) -> bool) -> Vec<bool> {
    let n = g.owner.len();
    let mut in_attr = vec![false; n];
    let mut edge_good = vec![false; g.edges.len()];
    let mut pending: Vec<usize> = g.out.iter().map(Vec::len).collect();
    let mut queue: Vec<usize> = Vec::new();

    let mark = |e: usize,
                    edge_good: &mut Vec<bool>,
                    pending: &mut Vec<usize>,
                    in_attr: &mut Vec<bool>,
                    queue: &mut Vec<usize>| {
        if edge_good[e] {
            return;
        }
        edge_good[e] = true;
        let v = g.edges[e].from;
        if in_attr[v] {
            return;
        }
        pending[v] -= 1;
        if g.owner[v] == Player::Prover || pending[v] == 0 {
            in_attr[v] = true;
            queue.push(v);
        }
    };

    for e in 0..g.edges.len() {
        if good(e) {
            mark(e, &mut edge_good, &mut pending, &mut in_attr, &mut queue);
        }
    }
    while let Some(v) = queue.pop() {
        for &e in &g.inc[v] {
            mark(e, &mut edge_good, &mut pending, &mut in_attr, &mut queue);
        }
    }
    in_attr
}

/// Zielonka's recursive algorithm on the game obtained by placing a vertex in the middle of
/// every edge. Middle vertices carry the edge priority; original vertices get a priority above
/// all edge priorities, so they never decide a play.
pub fn solve_parity(g: &GameArena) -> Result<WinningRegions> {
    expect_condition(g, g.condition == Condition::Parity, "parity")?;
    let norm = normalize(g);
    let n = norm.owner.len();
    let m = norm.edges.len();
    let neutral = norm.edges.iter().map(|e| e.priority).max().unwrap_or(0) + 1;
    let total = n + m;
    let mut owner = norm.owner.clone();
    let mut prio = vec![neutral; n];
    let mut succ = vec![Vec::new(); total];
    let mut pred = vec![Vec::new(); total];
    for (i, e) in norm.edges.iter().enumerate() {
        let mid = n + i;
        owner.push(Player::Prover);
        prio.push(e.priority);
        succ[e.from].push(mid);
        pred[mid].push(e.from);
        succ[mid].push(e.to);
        pred[e.to].push(mid);
    }
    let pg = VertexGame {
        owner,
        prio,
        succ,
        pred,
    };
    let live = vec![true; total];
    let win = zielonka(&pg, &live);
    Ok(WinningRegions {
        prover: win[..n].to_vec(),
    })
}

struct VertexGame {
    owner: Vec<Player>,
    prio: Vec<u32>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

/// Attractor for `player` to `target` inside the sub-game `live` (assumed to be a trap-closed
/// sub-game where every vertex keeps a successor).
fn attractor(g: &VertexGame, live: &[bool], target: &[bool], player: Player) -> Vec<bool> {
    let n = g.owner.len();
    let mut attr = vec![false; n];
    let mut count: Vec<usize> = (0..n)
        .map(|v| if live[v] { g.succ[v].iter().filter(|&&w| live[w]).count() } else { 0 })
        .collect();
    let mut queue = Vec::new();
    for v in 0..n {
        if live[v] && target[v] {
            attr[v] = true;
            queue.push(v);
        }
    }
    while let Some(w) = queue.pop() {
        for &v in &g.pred[w] {
            if !live[v] || attr[v] {
                continue;
            }
            if g.owner[v] == player {
                attr[v] = true;
                queue.push(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    attr[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    attr
}

/// Returns Prover's winning region inside `live`.
fn zielonka(g: &VertexGame, live: &[bool]) -> Vec<bool> {
    let n = g.owner.len();
    let Some(p) = (0..n).filter(|&v| live[v]).map(|v| g.prio[v]).min() else {
        return vec![false; n];
    };
    let alpha = if p % 2 == 0 { Player::Prover } else { Player::Refuter };
    let target: Vec<bool> = (0..n).map(|v| live[v] && g.prio[v] == p).collect();
    let a = attractor(g, live, &target, alpha);
    let sub: Vec<bool> = (0..n).map(|v| live[v] && !a[v]).collect();
    let w_sub = zielonka(g, &sub);
    let opp_region: Vec<bool> = (0..n)
        .map(|v| sub[v] && (w_sub[v] != (alpha == Player::Prover)))
        .collect();
    if !opp_region.iter().any(|&b| b) {
        return (0..n).map(|v| live[v] && alpha == Player::Prover).collect();
    }
    let b = attractor(g, live, &opp_region, alpha.opponent());
    let sub2: Vec<bool> = (0..n).map(|v| live[v] && !b[v]).collect();
    let w2 = zielonka(g, &sub2);
    match alpha {
        Player::Prover => w2,
        Player::Refuter => (0..n).map(|v| w2[v] || b[v]).collect(),
    }
}
