//! Layered automata over infinite words: models, games, decision procedures, minimization and
//! the congruence-based canonical form.

pub mod alphabet;
pub mod alternating;
pub mod congruence;
pub mod decisions;
pub mod dot;
pub mod dpa;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod graph;
pub mod layered;
pub mod minimize;
pub mod morphism;
pub mod semantics;
pub mod simulate;
pub mod word;

pub use alphabet::{Alphabet, Letter};
pub use alternating::{AlternatingAutomaton, NestedRelations};
pub use dpa::{Dpa, DeterministicParityAutomaton};
pub use error::{Error, Result};
pub use layered::{Diagnostic, LayeredAutomaton, LayeredBuilder, StateId};
pub use word::UpWord;
