//! Consistency and entailment for ALCQ ontologies.

mod tableau;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::dl::{Axiom, Concept, DlError, Ontology};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("tableau node budget of {budget} exceeded")]
    NodeBudgetExceeded { budget: u64 },
    #[error(transparent)]
    Dl(#[from] DlError),
}

#[derive(Clone, Copy, Debug)]
pub struct ReasonerConfig {
    /// Per check: completion-graph nodes created, branch alternatives and
    /// nodes copied when a branch is entered.
    pub node_budget: u64,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig { node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReasonerStats {
    pub consistency_calls: u64,
    pub tableau_nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
}

/// Stateless decision procedure with shared call counters.
///
/// The counters are atomic, so one reasoner may be shared between threads.
#[derive(Debug, Default)]
pub struct Reasoner {
    config: ReasonerConfig,
    calls: AtomicU64,
    nodes: AtomicU64,
}

impl Reasoner {
    pub fn new(config: ReasonerConfig) -> Self {
        Reasoner { config, calls: AtomicU64::new(0), nodes: AtomicU64::new(0) }
    }

    pub fn with_budget(node_budget: u64) -> Self {
        Self::new(ReasonerConfig { node_budget })
    }

    pub fn config(&self) -> ReasonerConfig {
        self.config
    }

    pub fn check<'a>(&self, axioms: impl IntoIterator<Item = &'a Axiom>) -> Result<ConsistencyVerdict, ReasonerError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let run = tableau::check(axioms, self.config.node_budget);
        match run {
            Ok(r) => {
                self.nodes.fetch_add(r.nodes, Ordering::Relaxed);
                Ok(ConsistencyVerdict { consistent: r.consistent })
            }
            Err(e) => {
                self.nodes.fetch_add(self.config.node_budget, Ordering::Relaxed);
                Err(e)
            }
        }
    }

    pub fn is_consistent<'a>(&self, axioms: impl IntoIterator<Item = &'a Axiom>) -> Result<bool, ReasonerError> {
        self.check(axioms).map(|v| v.consistent)
    }

    /// `o ⊨ alpha` for an ABox axiom `alpha`.
    pub fn entails<'a>(&self, o: impl IntoIterator<Item = &'a Axiom>, alpha: &Axiom) -> Result<bool, ReasonerError> {
        let neg = alpha.negate_assertion()?;
        let mut all: Vec<&Axiom> = Vec::new();
        for a in o {
            all.push(a);
        }
        all.push(&neg);
        Ok(!self.is_consistent(all)?)
    }

    /// Candidates `a` with `o ⊨ c(a)`, in input order.
    pub fn instances<'a, S: AsRef<str>>(
        &self,
        o: impl IntoIterator<Item = &'a Axiom> + Clone,
        c: &Concept,
        candidates: &[S],
    ) -> Result<Vec<String>, ReasonerError> {
        let mut out = Vec::new();
        for a in candidates {
            let a = a.as_ref();
            if *c == Concept::Top || self.entails(o.clone(), &Axiom::class(c.clone(), a))? {
                out.push(a.to_string());
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> ReasonerStats {
        ReasonerStats {
            consistency_calls: self.calls.load(Ordering::Relaxed),
            tableau_nodes: self.nodes.load(Ordering::Relaxed),
        }
    }

    pub fn reset_stats(&self) {
        self.calls.store(0, Ordering::Relaxed);
        self.nodes.store(0, Ordering::Relaxed);
    }
}

/// A reasoner bound to one ontology; extra axioms are passed per call.
#[derive(Debug)]
pub struct ReasonerHandle<'o> {
    ontology: &'o Ontology,
    reasoner: Reasoner,
}

impl<'o> ReasonerHandle<'o> {
    pub fn load(ontology: &'o Ontology, config: ReasonerConfig) -> Self {
        ReasonerHandle { ontology, reasoner: Reasoner::new(config) }
    }

    pub fn ontology(&self) -> &'o Ontology {
        self.ontology
    }

    pub fn reasoner(&self) -> &Reasoner {
        &self.reasoner
    }

    pub fn is_consistent(&self) -> Result<ConsistencyVerdict, ReasonerError> {
        self.reasoner.check(self.ontology.iter())
    }

    pub fn is_consistent_with(&self, extra: &[Axiom]) -> Result<ConsistencyVerdict, ReasonerError> {
        self.reasoner.check(self.ontology.iter().chain(extra))
    }

    pub fn entails(&self, alpha: &Axiom) -> Result<bool, ReasonerError> {
        self.reasoner.entails(self.ontology.iter(), alpha)
    }

    pub fn entails_with(&self, extra: &[Axiom], alpha: &Axiom) -> Result<bool, ReasonerError> {
        self.reasoner.entails(self.ontology.iter().chain(extra), alpha)
    }

    pub fn instances<S: AsRef<str>>(&self, c: &Concept, candidates: &[S]) -> Result<Vec<String>, ReasonerError> {
        self.reasoner.instances(self.ontology, c, candidates)
    }

    pub fn stats(&self) -> ReasonerStats {
        self.reasoner.stats()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::parse_ontology;

    const PR2_ONTOLOGY: &str = "
        ClassAssertion(PR2 stackBot)
        ClassAssertion(Block blockA)
        ClassAssertion(Block blockB)
        ClassAssertion(Block blockC)
        DifferentIndividuals(blockA blockB)
        DifferentIndividuals(blockA blockC)
        DifferentIndividuals(blockB blockC)
        SubClassOf(PR2 ObjectIntersectionOf(Robot ObjectMaxCardinality(2 holds Block)))
        SubClassOf(ObjectIntersectionOf(PR2 ObjectExactCardinality(2 holds Block)) FullHands)
    ";

    fn fig1() -> Ontology {
        parse_ontology(PR2_ONTOLOGY).unwrap()
    }

    fn holds(b: &str) -> Axiom {
        Axiom::role("holds", "stackBot", b)
    }

    #[test]
    fn static_ontology_consistent() {
        let r = Reasoner::default();
        assert!(r.is_consistent(fig1().iter()).unwrap());
    }

    #[test]
    fn three_held_blocks_inconsistent() {
        let r = Reasoner::default();
        let o = fig1();
        let extra = [holds("blockA"), holds("blockB"), holds("blockC")];
        assert!(!r.is_consistent(o.iter().chain(&extra)).unwrap());
        assert!(r.is_consistent(o.iter().chain(&extra[..2])).unwrap());
    }

    #[test]
    fn falsum_inconsistent() {
        let r = Reasoner::default();
        assert!(!r.is_consistent([&Axiom::falsum()]).unwrap());
    }

    #[test]
    fn two_held_blocks_entail_full_hands() {
        let r = Reasoner::default();
        let o = fig1();
        let extra = [holds("blockA"), holds("blockB")];
        let q = Axiom::class(Concept::name("FullHands"), "stackBot");
        assert!(r.entails(o.iter().chain(&extra), &q).unwrap());
        assert!(!r.entails(o.iter(), &q).unwrap());
        assert!(!r.entails(o.iter().chain(&extra[..1]), &q).unwrap());
    }

    #[test]
    fn top_assertion_always_entailed() {
        let r = Reasoner::default();
        assert!(r.entails(fig1().iter(), &Axiom::class(Concept::Top, "zed")).unwrap());
    }

    #[test]
    fn instances_of_robot_and_block() {
        let o = fig1();
        let h = ReasonerHandle::load(&o, ReasonerConfig::default());
        let all = ["stackBot", "blockA", "blockB", "blockC"];
        assert_eq!(h.instances(&Concept::name("Robot"), &all).unwrap(), vec!["stackBot"]);
        assert_eq!(h.instances(&Concept::name("Block"), &all).unwrap(), vec!["blockA", "blockB", "blockC"]);
        assert_eq!(h.instances(&Concept::Top, &all).unwrap().len(), 4);
    }

    #[test]
    fn counters_increase() {
        let r = Reasoner::default();
        let o = fig1();
        r.is_consistent(o.iter()).unwrap();
        let a = r.stats().consistency_calls;
        r.is_consistent(o.iter()).unwrap();
        assert_eq!(r.stats().consistency_calls, a + 1);
    }

    #[test]
    fn cyclic_existential_terminates() {
        let o = parse_ontology(
            "SubClassOf(owl:Thing ObjectSomeValuesFrom(r A))\nSubClassOf(A ObjectMinCardinality(2 r B))\nClassAssertion(A a)",
        )
        .unwrap();
        assert!(Reasoner::default().is_consistent(o.iter()).unwrap());
    }

    #[test]
    fn at_most_forces_merge() {
        let o = parse_ontology(
            "ClassAssertion(ObjectMaxCardinality(1 r owl:Thing) a)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r a c)\nClassAssertion(B b)\nClassAssertion(ObjectComplementOf(B) c)",
        )
        .unwrap();
        assert!(!Reasoner::default().is_consistent(o.iter()).unwrap());
        let o2 = parse_ontology(
            "ClassAssertion(ObjectMaxCardinality(1 r owl:Thing) a)\nObjectPropertyAssertion(r a b)\nObjectPropertyAssertion(r a c)\nClassAssertion(B b)",
        )
        .unwrap();
        assert!(Reasoner::default().is_consistent(o2.iter()).unwrap());
    }

    #[test]
    fn same_and_different_clash() {
        let o = parse_ontology("SameIndividual(a b)\nDifferentIndividuals(a b)").unwrap();
        assert!(!Reasoner::default().is_consistent(o.iter()).unwrap());
    }

    #[test]
    fn negative_role_assertion_clash() {
        let o = parse_ontology("ObjectPropertyAssertion(r a b)\nNegativeObjectPropertyAssertion(r a b)").unwrap();
        assert!(!Reasoner::default().is_consistent(o.iter()).unwrap());
        let o = parse_ontology(
            "ObjectPropertyAssertion(r a b)\nNegativeObjectPropertyAssertion(r a c)\nSameIndividual(b c)",
        )
        .unwrap();
        assert!(!Reasoner::default().is_consistent(o.iter()).unwrap());
    }

    #[test]
    fn budget_exceeded_is_error() {
        let o = parse_ontology("SubClassOf(owl:Thing ObjectMinCardinality(2 r ObjectSomeValuesFrom(s A)))\nClassAssertion(B a)\nSubClassOf(A ObjectComplementOf(B))").unwrap();
        let r = Reasoner::with_budget(3);
        assert_eq!(r.is_consistent(o.iter()), Err(ReasonerError::NodeBudgetExceeded { budget: 3 }));
    }

    #[test]
    fn disjunction_backtracks() {
        let o = parse_ontology(
            "ClassAssertion(ObjectUnionOf(A B) a)\nSubClassOf(A owl:Nothing)\nClassAssertion(ObjectComplementOf(B) a)",
        )
        .unwrap();
        assert!(!Reasoner::default().is_consistent(o.iter()).unwrap());
    }

    #[test]
    fn entails_requires_abox_query() {
        let r = Reasoner::default();
        let e = r.entails(std::iter::empty(), &Axiom::falsum());
        assert!(matches!(e, Err(ReasonerError::Dl(DlError::NotAnAssertion(_)))));
    }
}
