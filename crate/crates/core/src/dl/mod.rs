//! ALCQ syntax: concepts, axioms, ontologies, and their functional-style text form.

mod axiom;
mod concept;
mod ontology;
mod parser;
mod pattern;

use std::fmt;

use thiserror::Error;

pub use axiom::Axiom;
pub use concept::Concept;
pub use ontology::{Ontology, Signature};
pub use parser::{parse_axiom, parse_concept, parse_ontology, print_ontology};
pub use pattern::{AxiomPattern, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameKind {
    Concept,
    Role,
    Individual,
}

impl NameKind {
    fn describe(self) -> &'static str {
        match self {
            NameKind::Concept => "a concept name",
            NameKind::Role => "a role name",
            NameKind::Individual => "an individual name",
        }
    }
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Concept => "concept",
            NameKind::Role => "role",
            NameKind::Individual => "individual",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported construct `{construct}` at {line}:{col}")]
    Unsupported { construct: String, line: usize, col: usize },
    #[error("name `{name}` used as {first} and as {second}")]
    NameCategory { name: String, first: NameKind, second: NameKind },
    #[error("not an ABox axiom: {0}")]
    NotAnAssertion(String),
    #[error("requires query as concept assertion: {0}")]
    RequiresConceptAssertion(String),
}
