use thiserror::Error;

use crate::layered::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (unknown state, layer out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The input does not satisfy a checked precondition. `witness` names the offending objects.
    #[error("precondition `{property}` violated: {witness}")]
    Precondition { property: String, witness: String },
    #[error("invalid automaton: {}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("invalid game arena: {0}")]
    Arena(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// A well-formed document that does not describe an automaton; `path` locates the field.
    #[error("document error at {path}: {message}")]
    Schema { path: String, message: String },
    /// A post-condition check failed. This indicates a bug in this crate.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn precondition(property: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Precondition {
            property: property.into(),
            witness: witness.into(),
        }
    }
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
