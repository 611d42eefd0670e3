//! Ontology-mediated planning: ALCQ reasoning, justification enumeration,
//! PDDL handling, compilation of ontology-mediated specifications into PDDL
//! with derived predicates, and a reference planner and validator.

pub mod dl;
pub mod reasoner;
pub mod justify;
pub mod pddl;
pub mod omps;
pub mod rewrite;
pub mod planner;
