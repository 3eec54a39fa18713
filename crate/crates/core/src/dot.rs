//! Graphviz output. Layers become ranked clusters, parent maps dotted edges and transitions
//! solid labelled edges.

use std::fmt::Write;

use crate::alternating::AlternatingAutomaton;
use crate::layered::{LayeredAutomaton, StateId};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node_id(s: StateId) -> String {
    format!("n{}_{}", s.layer, s.index)
}

pub fn layered_to_dot(a: &LayeredAutomaton) -> String {
    let sigma = a.alphabet();
    let mut out = String::from("digraph layered {\n  rankdir=LR;\n  node [shape=circle];\n");
    for x in 1..=a.depth() {
        writeln!(out, "  subgraph cluster_layer{x} {{\n    label=\"layer {x}\";\n    rank=same;").unwrap();
        for s in a.layer_states(x) {
            let shape = if s == a.initial() { ", shape=doublecircle" } else { "" };
            writeln!(out, "    {} [label={}{shape}];", node_id(s), quote(a.name(s))).unwrap();
        }
        out.push_str("  }\n");
    }
    for s in a.states() {
        // group letters with the same target on one edge
        let mut edges: Vec<(StateId, Vec<&str>)> = Vec::new();
        for l in sigma.iter() {
            if let Some(t) = a.succ(s, l) {
                match edges.iter_mut().find(|(u, _)| *u == t) {
                    Some((_, ls)) => ls.push(sigma.symbol(l)),
                    None => edges.push((t, vec![sigma.symbol(l)])),
                }
            }
        }
        for (t, ls) in edges {
            writeln!(out, "  {} -> {} [label={}];", node_id(s), node_id(t), quote(&ls.join(","))).unwrap();
        }
    }
    for s in a.states() {
        if let Some(p) = a.parent(s) {
            writeln!(out, "  {} -> {} [style=dotted, arrowhead=none];", node_id(s), node_id(p)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Flat graph; edges are labelled `symbol:priority`.
pub fn alternating_to_dot(b: &AlternatingAutomaton) -> String {
    let sigma = b.alphabet();
    let mut out = String::from("digraph alternating {\n  rankdir=LR;\n  node [shape=circle];\n");
    for q in 0..b.len() {
        let shape = if q == b.initial() { ", shape=doublecircle" } else { "" };
        writeln!(out, "  q{q} [label={}{shape}];", quote(b.name(q))).unwrap();
    }
    for (q, l, p, t) in b.transitions() {
        writeln!(out, "  q{q} -> q{t} [label={}];", quote(&format!("{}:{p}", sigma.symbol(l)))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpa::dpa_to_layered;
    use crate::fixtures::{gen_parity, gen_two_strand};

    #[test]
    fn parity_two_clusters_one_parent_edge() {
        let a = dpa_to_layered(&gen_parity(2).unwrap());
        let dot = layered_to_dot(&a);
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert_eq!(dot.matches("style=dotted").count(), 1);
        assert_eq!(dot, layered_to_dot(&a));
    }

    #[test]
    fn two_strands_under_one_root() {
        let a = gen_two_strand(4).unwrap();
        let dot = layered_to_dot(&a);
        assert_eq!(dot.matches("style=dotted").count(), 8);
        assert_eq!(dot.matches("-> n1_0 [style=dotted").count(), 2);
    }
}
