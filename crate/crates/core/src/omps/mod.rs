//! Ontology-mediated planning specifications: the fluent and query
//! interfaces, compatible ontology-enhanced states, and the reasoner-backed
//! reference semantics of plans.

mod interface;
mod manifest;
mod semantics;

use std::collections::BTreeSet;
use std::path::PathBuf;

use indexmap::IndexMap;
use thiserror::Error;

use crate::dl::{Axiom, AxiomPattern, Concept, DlError, Ontology, Valuation};
use crate::pddl::{GroundAtom, PddlError, PddlSpec};
use crate::reasoner::ReasonerError;

pub use interface::parse_interface;
pub use manifest::Manifest;
pub use semantics::{candidates, Condition, OntologyEnhancedState, PlanFailure, PlanVerdict, Semantics, Verdict};

#[derive(Debug, Error)]
pub enum OmpsError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Dl(#[from] DlError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("interface line {line}: {message}")]
    Interface { line: usize, message: String },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error("state contains query atom {0}")]
    QueryAtomInState(GroundAtom),
}

/// The ontology side of a mapped predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FluentTarget {
    /// Unary predicate to concept name: `p(c)` ↦ `A(a)`.
    Concept(String),
    /// Binary predicate to role name: `p(c, d)` ↦ `r(a, b)`.
    Role(String),
    /// Binary predicate to a negative role assertion `¬r(a, b)`.
    NegativeRole(String),
}

impl FluentTarget {
    fn arity(&self) -> usize {
        match self {
            FluentTarget::Concept(_) => 1,
            _ => 2,
        }
    }
}

/// The fluent interface `F` with its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FluentInterface {
    objects: IndexMap<String, String>,
    individuals: IndexMap<String, String>,
    predicates: IndexMap<String, FluentTarget>,
    targets: IndexMap<FluentTarget, String>,
}

impl FluentInterface {
    pub fn new() -> Self {
        Self::default()
    }

    /// Maps a constant to an individual; the map must stay injective.
    pub fn map_object(&mut self, constant: &str, individual: &str) -> Result<(), String> {
        if let Some(prev) = self.objects.get(constant) {
            return Err(format!("constant `{constant}` already mapped to `{prev}`"));
        }
        if let Some(prev) = self.individuals.get(individual) {
            return Err(format!("individual `{individual}` already image of `{prev}`"));
        }
        self.objects.insert(constant.to_string(), individual.to_string());
        self.individuals.insert(individual.to_string(), constant.to_string());
        Ok(())
    }

    /// Maps a predicate; the map must stay injective.
    pub fn map_predicate(&mut self, predicate: &str, target: FluentTarget) -> Result<(), String> {
        if self.predicates.contains_key(predicate) {
            return Err(format!("predicate `{predicate}` mapped twice"));
        }
        if let Some(prev) = self.targets.get(&target) {
            return Err(format!("{target:?} already image of `{prev}`"));
        }
        self.predicates.insert(predicate.to_string(), target.clone());
        self.targets.insert(target, predicate.to_string());
        Ok(())
    }

    pub fn individual(&self, constant: &str) -> Option<&str> {
        self.objects.get(constant).map(String::as_str)
    }

    pub fn constant(&self, individual: &str) -> Option<&str> {
        self.individuals.get(individual).map(String::as_str)
    }

    /// Mapped constants in mapping order.
    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.objects.keys().map(String::as_str)
    }

    /// Individuals with a defined inverse, in mapping order.
    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        self.objects.values().map(String::as_str)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, &FluentTarget)> {
        self.predicates.iter().map(|(p, t)| (p.as_str(), t))
    }

    pub fn is_mapped(&self, predicate: &str) -> bool {
        self.predicates.contains_key(predicate)
    }

    /// `F(α)` for a planning atom, if defined.
    pub fn map_atom(&self, atom: &GroundAtom) -> Option<Axiom> {
        let target = self.predicates.get(&atom.predicate)?;
        if atom.args.len() != target.arity() {
            return None;
        }
        let inds: Vec<&str> = atom.args.iter().map(|c| self.individual(c)).collect::<Option<_>>()?;
        Some(match target {
            FluentTarget::Concept(c) => Axiom::class(Concept::name(c.clone()), inds[0]),
            FluentTarget::Role(r) => Axiom::role(r.clone(), inds[0], inds[1]),
            FluentTarget::NegativeRole(r) => Axiom::neg_role(r.clone(), inds[0], inds[1]),
        })
    }

    /// `F⁻(β)` for a fluent axiom, if defined.
    pub fn unmap_axiom(&self, ax: &Axiom) -> Option<GroundAtom> {
        let (target, inds): (FluentTarget, Vec<&str>) = match ax {
            Axiom::ClassAssertion(Concept::Name(c), a) => (FluentTarget::Concept(c.clone()), vec![a]),
            Axiom::RoleAssertion(r, a, b) => (FluentTarget::Role(r.clone()), vec![a, b]),
            Axiom::NegativeRoleAssertion(r, a, b) => (FluentTarget::NegativeRole(r.clone()), vec![a, b]),
            _ => return None,
        };
        let pred = self.targets.get(&target)?;
        let args: Vec<String> =
            inds.into_iter().map(|a| self.constant(a).map(str::to_string)).collect::<Option<_>>()?;
        Some(GroundAtom { predicate: pred.clone(), args })
    }

    /// The fluents: every assertion in the image of `F`, by predicate then
    /// by constant tuple in mapping order.
    pub fn fluents(&self) -> Vec<Axiom> {
        let consts: Vec<&String> = self.objects.keys().collect();
        let mut out = Vec::new();
        for (p, t) in &self.predicates {
            if t.arity() == 1 {
                for c in &consts {
                    out.extend(self.map_atom(&GroundAtom::new(p.clone(), [c.as_str()])));
                }
            } else {
                for c in &consts {
                    for d in &consts {
                        out.extend(self.map_atom(&GroundAtom::new(p.clone(), [c.as_str(), d.as_str()])));
                    }
                }
            }
        }
        out
    }
}

/// `p(x1: C1, ..., xn: Cn) <- Φ(x1, ..., xn)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub predicate: String,
    pub vars: Vec<String>,
    pub types: Vec<Concept>,
    pub query: Vec<AxiomPattern>,
}

impl QuerySpec {
    /// `Φ(a1, ..., an)` for individuals `a`.
    pub fn instantiate(&self, individuals: &[String]) -> Vec<Axiom> {
        let val: Valuation = self.vars.iter().cloned().zip(individuals.iter().cloned()).collect();
        self.query.iter().map(|p| p.instantiate(&val).expect("query variables are bound")).collect()
    }
}

/// `OP = ⟨S, O_s, F, Q⟩`.
#[derive(Clone, Debug)]
pub struct Omps {
    pub spec: PddlSpec,
    pub static_ontology: Ontology,
    pub interface: FluentInterface,
    pub queries: Vec<QuerySpec>,
}

impl Omps {
    /// Checks the invariants binding the four components together.
    pub fn new(
        spec: PddlSpec,
        static_ontology: Ontology,
        interface: FluentInterface,
        queries: Vec<QuerySpec>,
    ) -> Result<Omps, OmpsError> {
        let omps = Omps { spec, static_ontology, interface, queries };
        omps.validate()?;
        Ok(omps)
    }

    fn validate(&self) -> Result<(), OmpsError> {
        let derived = self.spec.derived_predicates();
        let consts = self.spec.constants();
        for c in self.interface.constants() {
            if !consts.iter().any(|x| x == c) {
                return Err(OmpsError::Invalid(format!("mapped constant `{c}` is not declared")));
            }
        }
        for (p, t) in self.interface.predicates() {
            let decl = self
                .spec
                .domain
                .predicate(p)
                .ok_or_else(|| OmpsError::Invalid(format!("mapped predicate `{p}` is not declared")))?;
            if decl.arity() != t.arity() {
                return Err(OmpsError::Invalid(format!("mapped predicate `{p}` has arity {}", decl.arity())));
            }
            if derived.contains(p) {
                return Err(OmpsError::Invalid(format!("mapped predicate `{p}` is derived")));
            }
        }
        for f in self.interface.fluents() {
            if self.static_ontology.contains(&f) {
                return Err(OmpsError::Invalid(format!("fluent {f} is part of the static ontology")));
            }
        }
        let mut seen = BTreeSet::new();
        for q in &self.queries {
            if !seen.insert(q.predicate.as_str()) {
                return Err(OmpsError::Invalid(format!("query predicate `{}` specified twice", q.predicate)));
            }
            let p = q.predicate.as_str();
            let decl = self
                .spec
                .domain
                .predicate(p)
                .ok_or_else(|| OmpsError::Invalid(format!("query predicate `{p}` is not declared")))?;
            if decl.arity() != q.vars.len() {
                return Err(OmpsError::Invalid(format!("query predicate `{p}` has arity {}", decl.arity())));
            }
            if !self.is_derived_only(p) {
                return Err(OmpsError::Invalid(format!("query predicate `{p}` is not derived")));
            }
            for pat in &q.query {
                if !pat.axiom.is_abox() {
                    return Err(OmpsError::Invalid(format!("query of `{p}` contains TBox axiom {}", pat.axiom)));
                }
            }
        }
        Ok(())
    }

    /// Whether `p` is set by no effect, no initial atom, no rule and no fluent mapping.
    fn is_derived_only(&self, p: &str) -> bool {
        let d = &self.spec.domain;
        !self.interface.is_mapped(p)
            && !d.rules.iter().any(|r| r.head.predicate == p)
            && !d.actions.iter().any(|a| a.add.iter().chain(&a.del).any(|x| x.predicate == p))
            && !self.spec.problem.init.iter().any(|a| a.predicate == p)
    }

    pub fn query_predicates(&self) -> BTreeSet<String> {
        self.queries.iter().map(|q| q.predicate.clone()).collect()
    }

    /// The fluents of the specification.
    pub fn fluents(&self) -> Vec<Axiom> {
        self.interface.fluents()
    }
}

/// The fluent set of `omps`.
pub fn fluents_of(omps: &Omps) -> Vec<Axiom> {
    omps.fluents()
}
