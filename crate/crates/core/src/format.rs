//! JSON documents for layered automata, DPAs and alternating automata.
//!
//! Every document carries a `kind` tag and a `version`; [`parse_any`] dispatches on the tag.
//! Serialization is canonical: states and transitions are listed in the automaton's own order,
//! so equal automata serialize to equal bytes.

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::alternating::AlternatingAutomaton;
use crate::dpa::Dpa;
use crate::error::{Error, Result};
use crate::layered::{LayeredAutomaton, LayeredBuilder};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayeredDocument {
    pub kind: String,
    pub version: u32,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub layers: Vec<LayerDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDocument {
    pub states: Vec<StateDocument>,
    /// `[from, symbol, to]`
    #[serde(default)]
    pub transitions: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpaDocument {
    pub kind: String,
    pub version: u32,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub max_priority: u32,
    pub states: Vec<String>,
    /// `[from, symbol, priority, to]`
    pub transitions: Vec<(String, String, u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternatingDocument {
    pub kind: String,
    pub version: u32,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub states: Vec<String>,
    /// `[from, symbol, priority, to]`
    pub transitions: Vec<(String, String, u32, String)>,
}

/// Any automaton a document can describe.
#[derive(Clone, Debug)]
pub enum Automaton {
    Layered(LayeredAutomaton),
    Dpa(Dpa),
    Alternating(AlternatingAutomaton),
}

pub const LAYERED: &str = "layered";
pub const DPA: &str = "dpa";
pub const ALTERNATING: &str = "alternating";

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn check_header(kind: &str, version: u32, want: &str) -> Result<()> {
    if kind != want {
        return Err(schema("kind", format!("expected `{want}`, found `{kind}`")));
    }
    if version != VERSION {
        return Err(schema("version", format!("unsupported version {version}")));
    }
    Ok(())
}

fn alphabet_of(symbols: &[String]) -> Result<Alphabet> {
    Alphabet::new(symbols.iter().cloned()).map_err(|e| schema("alphabet", e.to_string()))
}

#[derive(Deserialize)]
struct Header {
    kind: String,
}

/// Parses a document of any kind.
pub fn parse_any(text: &str) -> Result<Automaton> {
    let header: Header = serde_json::from_str(text).map_err(json_error)?;
    match header.kind.as_str() {
        LAYERED => parse_layered(text).map(Automaton::Layered),
        DPA => parse_dpa(text).map(Automaton::Dpa),
        ALTERNATING => parse_alternating(text).map(Automaton::Alternating),
        k => Err(schema("kind", format!("unknown document kind `{k}`"))),
    }
}

/// Parses a layered automaton. Structural problems (bad references, duplicate ids within a
/// layer) are errors; semantic ones (completeness, morphism, determinism, ...) are left to
/// [`LayeredAutomaton::validate`].
pub fn parse_layered(text: &str) -> Result<LayeredAutomaton> {
    let doc: LayeredDocument = serde_json::from_str(text).map_err(json_error)?;
    from_layered_document(&doc)
}

pub fn from_layered_document(doc: &LayeredDocument) -> Result<LayeredAutomaton> {
    check_header(&doc.kind, doc.version, LAYERED)?;
    let mut b = LayeredBuilder::new(alphabet_of(&doc.alphabet)?);
    if doc.layers.is_empty() {
        return Err(schema("layers", "at least one layer is required"));
    }
    for (i, layer) in doc.layers.iter().enumerate() {
        let x = i + 1;
        b.add_layer();
        for (j, s) in layer.states.iter().enumerate() {
            b.add_state(x, &s.id, s.parent.as_deref())
                .map_err(|e| schema(format!("layers[{i}].states[{j}]"), error_message(e)))?;
        }
    }
    for (i, layer) in doc.layers.iter().enumerate() {
        for (j, (f, s, t)) in layer.transitions.iter().enumerate() {
            b.add_transition(i + 1, f, s, t)
                .map_err(|e| schema(format!("layers[{i}].transitions[{j}]"), error_message(e)))?;
        }
    }
    b.set_initial(&doc.initial)
        .map_err(|e| schema("initial", error_message(e)))?;
    b.build()
}

fn error_message(e: Error) -> String {
    match e {
        Error::Domain(m) => m,
        other => other.to_string(),
    }
}

pub fn to_layered_document(a: &LayeredAutomaton) -> LayeredDocument {
    let sigma = a.alphabet();
    LayeredDocument {
        kind: LAYERED.into(),
        version: VERSION,
        alphabet: sigma.symbols().to_vec(),
        initial: a.name(a.initial()).to_string(),
        layers: (1..=a.depth())
            .map(|x| LayerDocument {
                states: a
                    .layer_states(x)
                    .map(|s| StateDocument {
                        id: a.name(s).to_string(),
                        parent: a.parent(s).map(|p| a.name(p).to_string()),
                    })
                    .collect(),
                transitions: a
                    .layer_states(x)
                    .flat_map(|s| {
                        sigma.iter().filter_map(move |l| {
                            a.succ(s, l).map(|t| {
                                (a.name(s).to_string(), sigma.symbol(l).to_string(), a.name(t).to_string())
                            })
                        })
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn serialize_layered(a: &LayeredAutomaton) -> String {
    to_json(&to_layered_document(a))
}

pub fn parse_dpa(text: &str) -> Result<Dpa> {
    let doc: DpaDocument = serde_json::from_str(text).map_err(json_error)?;
    from_dpa_document(&doc)
}

pub fn from_dpa_document(doc: &DpaDocument) -> Result<Dpa> {
    check_header(&doc.kind, doc.version, DPA)?;
    let sigma = alphabet_of(&doc.alphabet)?;
    let index = state_index(&doc.states)?;
    let lookup = |n: &str, path: &str| {
        index
            .get(n)
            .copied()
            .ok_or_else(|| schema(path, format!("unknown state `{n}`")))
    };
    let initial = lookup(&doc.initial, "initial")?;
    let mut delta: Vec<Vec<Option<(usize, u32)>>> = vec![vec![None; sigma.len()]; doc.states.len()];
    for (j, (f, s, p, t)) in doc.transitions.iter().enumerate() {
        let path = format!("transitions[{j}]");
        let (f, t) = (lookup(f, &path)?, lookup(t, &path)?);
        let l = sigma.letter_or_err(s).map_err(|e| schema(&path, error_message(e)))?;
        if delta[f][l].is_some_and(|old| old != (t, *p)) {
            return Err(schema(&path, format!("second transition for (`{}`, `{s}`)", doc.states[f])));
        }
        delta[f][l] = Some((t, *p));
    }
    let mut full = Vec::with_capacity(delta.len());
    for (q, row) in delta.into_iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (l, e) in row.into_iter().enumerate() {
            r.push(e.ok_or_else(|| {
                schema(
                    "transitions",
                    format!("no transition for (`{}`, `{}`)", doc.states[q], sigma.symbol(l)),
                )
            })?);
        }
        full.push(r);
    }
    Dpa::new(sigma, doc.states.clone(), initial, full, doc.max_priority)
}

fn state_index(states: &[String]) -> Result<std::collections::HashMap<String, usize>> {
    let mut index = std::collections::HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(schema(format!("states[{i}]"), format!("duplicate state id `{s}`")));
        }
    }
    Ok(index)
}

pub fn to_dpa_document(d: &Dpa) -> DpaDocument {
    let sigma = d.alphabet();
    DpaDocument {
        kind: DPA.into(),
        version: VERSION,
        alphabet: sigma.symbols().to_vec(),
        initial: d.name(d.initial()).to_string(),
        max_priority: d.max_priority(),
        states: d.names().to_vec(),
        transitions: (0..d.len())
            .flat_map(|q| {
                sigma.iter().map(move |l| {
                    let (t, p) = d.step(q, l);
                    (d.name(q).to_string(), sigma.symbol(l).to_string(), p, d.name(t).to_string())
                })
            })
            .collect(),
    }
}

pub fn serialize_dpa(d: &Dpa) -> String {
    to_json(&to_dpa_document(d))
}

pub fn parse_alternating(text: &str) -> Result<AlternatingAutomaton> {
    let doc: AlternatingDocument = serde_json::from_str(text).map_err(json_error)?;
    from_alternating_document(&doc)
}

pub fn from_alternating_document(doc: &AlternatingDocument) -> Result<AlternatingAutomaton> {
    check_header(&doc.kind, doc.version, ALTERNATING)?;
    let sigma = alphabet_of(&doc.alphabet)?;
    let index = state_index(&doc.states)?;
    let lookup = |n: &str, path: &str| {
        index
            .get(n)
            .copied()
            .ok_or_else(|| schema(path, format!("unknown state `{n}`")))
    };
    let initial = lookup(&doc.initial, "initial")?;
    let mut b = AlternatingAutomaton::new(sigma, doc.states.clone(), initial)?;
    for (j, (f, s, p, t)) in doc.transitions.iter().enumerate() {
        let path = format!("transitions[{j}]");
        let (f, t) = (lookup(f, &path)?, lookup(t, &path)?);
        let l = b.alphabet().letter_or_err(s).map_err(|e| schema(&path, error_message(e)))?;
        if *p == 0 {
            return Err(schema(&path, "priorities start at 1"));
        }
        b.add_transition(f, l, *p, t);
    }
    Ok(b)
}

pub fn to_alternating_document(b: &AlternatingAutomaton) -> AlternatingDocument {
    let sigma = b.alphabet();
    AlternatingDocument {
        kind: ALTERNATING.into(),
        version: VERSION,
        alphabet: sigma.symbols().to_vec(),
        initial: b.name(b.initial()).to_string(),
        states: b.names().to_vec(),
        transitions: b
            .transitions()
            .map(|(q, l, p, t)| (b.name(q).to_string(), sigma.symbol(l).to_string(), p, b.name(t).to_string()))
            .collect(),
    }
}

pub fn serialize_alternating(b: &AlternatingAutomaton) -> String {
    to_json(&to_alternating_document(b))
}

pub fn serialize(a: &Automaton) -> String {
    match a {
        Automaton::Layered(a) => serialize_layered(a),
        Automaton::Dpa(d) => serialize_dpa(d),
        Automaton::Alternating(b) => serialize_alternating(b),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("documents always serialize");
    let mut s = String::new();
    write_value(&mut s, &value, 0);
    s.push('\n');
    s
}

/// Indented JSON in which arrays and objects holding only scalars stay on one line, so that
/// every state and transition takes one line.
fn write_value(out: &mut String, v: &serde_json::Value, indent: usize) {
    use serde_json::Value;
    let flat = |v: &Value| !matches!(v, Value::Array(_) | Value::Object(_));
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if !items.is_empty() && !items.iter().all(flat) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.values().all(flat) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("[{}]", parts.join(", ")));
        }
        Value::Object(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, i)| format!("{}: {}", Value::String(k.clone()), i))
                .collect();
            out.push_str(&format!("{{{}}}", parts.join(", ")));
        }
        other => out.push_str(&other.to_string()),
    }
}
