//! Reasoner-backed reference semantics: candidates, `ext`, compatibility
//! and plan validation.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::dl::{Axiom, Concept, Ontology};
use crate::pddl::{apply, eval_formula, GroundAction, GroundAtom, RuleSet, State};
use crate::reasoner::Reasoner;

use super::{Omps, OmpsError, QuerySpec};

/// `q = ⟨s_q, O_q⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OntologyEnhancedState {
    pub state: State,
    pub ontology: Ontology,
    pub consistent: bool,
}

/// The compatibility conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// Atoms use declared predicates and constants.
    C1,
    /// `O_s ⊆ O_q`.
    C2,
    /// Every fluent image of `D(s_q)` is in `O_q`.
    C3,
    /// `O_q` holds nothing beyond `O_s` and those images.
    C4,
    /// Query atoms are exactly the entailed candidate instances.
    C5,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Compatible,
    Violation { condition: Condition, detail: String },
}

impl Verdict {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Verdict::Compatible)
    }
}

/// Why a plan was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlanFailure {
    /// The action's precondition fails in `D(s_q)`.
    Inapplicable,
    /// `O_q` is inconsistent.
    Inconsistent,
    /// The goal fails in the final derived view.
    GoalUnsatisfied,
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanFailure::Inapplicable => "precondition not satisfied",
            PlanFailure::Inconsistent => "P2: ontology-enhanced state inconsistent",
            PlanFailure::GoalUnsatisfied => "P3: goal not satisfied",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanVerdict {
    Accept,
    /// `step` is the index of the offending action, or of the state for
    /// inconsistency (0 is the initial state), or the plan length for the goal.
    Reject { step: usize, failure: PlanFailure, detail: String },
}

impl PlanVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, PlanVerdict::Accept)
    }
}

impl fmt::Display for PlanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanVerdict::Accept => f.write_str("accept"),
            PlanVerdict::Reject { step, failure, detail } => write!(f, "reject at step {step}: {failure}: {detail}"),
        }
    }
}

/// Candidate constant vectors of `q`: tuples of mapped individuals whose
/// static types `o_s` entails, mapped back to constants. Tuples are
/// enumerated with the first variable varying slowest, each position in
/// interface mapping order.
pub fn candidates(q: &QuerySpec, omps: &Omps, reasoner: &Reasoner) -> Result<Vec<Vec<String>>, OmpsError> {
    let o_s: Vec<&Axiom> = omps.static_ontology.iter().collect();
    let inconsistent = !reasoner.is_consistent(o_s.iter().copied())?;
    let mut per_var: Vec<Vec<String>> = Vec::with_capacity(q.vars.len());
    for ty in &q.types {
        let mut ok = Vec::new();
        for (c, a) in omps.interface.constants().zip(omps.interface.individuals()) {
            let hit = inconsistent
                || *ty == Concept::Top
                || reasoner.entails(o_s.iter().copied(), &Axiom::class(ty.clone(), a))?;
            if hit {
                ok.push(c.to_string());
            }
        }
        per_var.push(ok);
    }
    let mut out = vec![Vec::new()];
    for choices in per_var {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// The reference semantics of one specification, with candidates cached.
pub struct Semantics<'a> {
    omps: &'a Omps,
    reasoner: &'a Reasoner,
    rules: RuleSet,
    query_predicates: BTreeSet<String>,
    candidates: Vec<Vec<Vec<String>>>,
}

impl<'a> Semantics<'a> {
    pub fn new(omps: &'a Omps, reasoner: &'a Reasoner) -> Result<Self, OmpsError> {
        let candidates = omps.queries.iter().map(|q| candidates(q, omps, reasoner)).collect::<Result<_, _>>()?;
        Ok(Semantics {
            omps,
            reasoner,
            rules: omps.spec.rule_set(),
            query_predicates: omps.query_predicates(),
            candidates,
        })
    }

    /// Candidates of the `i`-th query.
    pub fn candidates(&self, i: usize) -> &[Vec<String>] {
        &self.candidates[i]
    }

    fn individuals(&self, consts: &[String]) -> Vec<String> {
        consts
            .iter()
            .map(|c| self.omps.interface.individual(c).expect("candidates are mapped").to_string())
            .collect()
    }

    /// `O_s ∪ F(D(s))`.
    fn ontology_of(&self, view: &State) -> Ontology {
        let mut o = self.omps.static_ontology.clone();
        o.extend(view.iter().filter_map(|a| self.omps.interface.map_atom(a)));
        o
    }

    /// The query atoms forced by `o_q`.
    fn forced(&self, o_q: &Ontology, consistent: bool) -> Result<Vec<GroundAtom>, OmpsError> {
        let mut out = Vec::new();
        for (q, cands) in self.omps.queries.iter().zip(&self.candidates) {
            for c in cands {
                let holds = !consistent || {
                    let phi = q.instantiate(&self.individuals(c));
                    let mut all = true;
                    for alpha in &phi {
                        if !self.reasoner.entails(o_q.iter(), alpha)? {
                            all = false;
                            break;
                        }
                    }
                    all
                };
                if holds {
                    out.push(GroundAtom { predicate: q.predicate.clone(), args: c.clone() });
                }
            }
        }
        Ok(out)
    }

    /// `ext(s, OP)`; `s` must not contain query atoms.
    pub fn ext(&self, s: &State) -> Result<OntologyEnhancedState, OmpsError> {
        if let Some(a) = s.iter().find(|a| self.query_predicates.contains(&a.predicate)) {
            return Err(OmpsError::QueryAtomInState(a.clone()));
        }
        // mapped predicates are never derived, so F(D(s)) only needs s
        let ontology = self.ontology_of(s);
        let consistent = self.reasoner.is_consistent(ontology.iter())?;
        let mut state = s.clone();
        for a in self.forced(&ontology, consistent)? {
            state.insert(a);
        }
        Ok(OntologyEnhancedState { state, ontology, consistent })
    }

    /// Checks C1 to C5 and reports the first violation.
    pub fn is_compatible(&self, q: &OntologyEnhancedState) -> Result<Verdict, OmpsError> {
        let violation = |condition, detail: String| Ok(Verdict::Violation { condition, detail });
        let consts: BTreeSet<String> = self.omps.spec.constants().into_iter().collect();
        for a in q.state.iter() {
            match self.omps.spec.domain.predicate(&a.predicate) {
                Some(p) if p.arity() == a.args.len() => {}
                _ => return violation(Condition::C1, format!("atom {a} uses an undeclared predicate")),
            }
            if let Some(c) = a.args.iter().find(|c| !consts.contains(*c)) {
                return violation(Condition::C1, format!("atom {a} uses undeclared constant `{c}`"));
            }
        }
        if let Some(ax) = self.omps.static_ontology.iter().find(|ax| !q.ontology.contains(ax)) {
            return violation(Condition::C2, format!("static axiom {ax} missing"));
        }
        let view = self.rules.derive(&q.state)?;
        let images: BTreeSet<Axiom> = view.iter().filter_map(|a| self.omps.interface.map_atom(a)).collect();
        if let Some(ax) = images.iter().find(|ax| !q.ontology.contains(ax)) {
            return violation(Condition::C3, format!("fluent image {ax} missing"));
        }
        if let Some(ax) = q.ontology.iter().find(|ax| !self.omps.static_ontology.contains(ax) && !images.contains(ax)) {
            return violation(Condition::C4, format!("unexpected axiom {ax}"));
        }
        let consistent = self.reasoner.is_consistent(q.ontology.iter())?;
        let forced: BTreeSet<GroundAtom> = self.forced(&q.ontology, consistent)?.into_iter().collect();
        for a in q.state.iter().filter(|a| self.query_predicates.contains(&a.predicate)) {
            if !forced.contains(a) {
                return violation(Condition::C5, format!("query atom {a} is not entailed"));
            }
        }
        if let Some(a) = forced.iter().find(|a| !q.state.contains(a)) {
            return violation(Condition::C5, format!("entailed query atom {a} missing"));
        }
        Ok(Verdict::Compatible)
    }

    /// Replays `actions` from the initial state under the reference semantics.
    pub fn validate_plan(&self, actions: &[GroundAction]) -> Result<PlanVerdict, OmpsError> {
        let reject = |step, failure, detail: String| Ok(PlanVerdict::Reject { step, failure, detail });
        let mut q = self.ext(&self.omps.spec.problem.init)?;
        if !q.consistent {
            return reject(0, PlanFailure::Inconsistent, "initial state".into());
        }
        for (i, a) in actions.iter().enumerate() {
            let view = self.rules.derive(&q.state)?;
            if !eval_formula(&a.precondition, &view)? {
                return reject(i, PlanFailure::Inapplicable, a.to_string());
            }
            q = self.ext(&apply(a, &q.state.without_predicates(&self.query_predicates)))?;
            if !q.consistent {
                return reject(i + 1, PlanFailure::Inconsistent, format!("after {a}"));
            }
        }
        let view = self.rules.derive(&q.state)?;
        if !eval_formula(&self.omps.spec.problem.goal, &view)? {
            return reject(actions.len(), PlanFailure::GoalUnsatisfied, "final state".into());
        }
        Ok(PlanVerdict::Accept)
    }
}
