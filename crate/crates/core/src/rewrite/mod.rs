//! Compilation of an ontology-mediated specification into plain PDDL with
//! derived predicates: entailment conditions per query candidate, the
//! inconsistency rule, and the `¬Inc` guards.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::dl::Axiom;
use crate::justify::{Algorithm, ExplanationTable, JustifyConfig, JustifyError, JustifyStats, Justifier};
use crate::omps::{candidates, FluentInterface, Omps, OmpsError, QuerySpec};
use crate::pddl::{Atom, DerivationRule, Formula, GroundAtom, PddlSpec, PredicateDecl};
use crate::reasoner::{Reasoner, ReasonerError};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("static ontology inconsistent")]
    StaticInconsistent,
    #[error(transparent)]
    Justify(#[from] JustifyError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Omps(#[from] OmpsError),
    #[error("fluent {0} has no planner image")]
    Unmapped(Axiom),
    #[error("no explanation rows were computed for {0}")]
    Uncovered(Axiom),
    #[error("rule for {head} exceeds the cap of {cap} disjuncts")]
    DisjunctCap { head: String, cap: usize },
}

impl RewriteError {
    /// Whether the failure is a reasoner resource limit.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            RewriteError::Reasoner(ReasonerError::NodeBudgetExceeded { .. })
                | RewriteError::Justify(JustifyError::Reasoner(ReasonerError::NodeBudgetExceeded { .. }))
                | RewriteError::Omps(OmpsError::Reasoner(ReasonerError::NodeBudgetExceeded { .. }))
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RewriteConfig {
    pub algorithm: Algorithm,
    pub justify: JustifyConfig,
    /// Maximum number of disjuncts in one emitted rule body.
    pub disjunct_cap: usize,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig { algorithm: Algorithm::default(), justify: JustifyConfig::default(), disjunct_cap: 100_000 }
    }
}

/// A DNF over planner atoms that holds exactly when the ontology entails
/// `target`. No disjuncts is false; an empty disjunct is true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectFormula {
    pub target: Axiom,
    pub disjuncts: BTreeSet<BTreeSet<GroundAtom>>,
}

impl DetectFormula {
    pub fn is_false(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.disjuncts.iter().any(BTreeSet::is_empty)
    }

    pub fn to_formula(&self) -> Formula {
        dnf_formula(&self.disjuncts)
    }
}

type Dnf = BTreeSet<BTreeSet<GroundAtom>>;

fn dnf_formula(d: &Dnf) -> Formula {
    let conj = |c: &BTreeSet<GroundAtom>| {
        let mut atoms: Vec<Formula> = c.iter().cloned().map(Formula::atom).collect();
        if atoms.len() == 1 {
            atoms.pop().unwrap()
        } else {
            Formula::And(atoms)
        }
    };
    let mut ds: Vec<Formula> = d.iter().map(conj).collect();
    if ds.len() == 1 {
        ds.pop().unwrap()
    } else {
        Formula::Or(ds)
    }
}

/// Keeps the subset-minimal members.
fn minimise(sets: impl IntoIterator<Item = BTreeSet<GroundAtom>>) -> Dnf {
    let mut all: Vec<BTreeSet<GroundAtom>> = sets.into_iter().collect();
    all.sort_by_key(BTreeSet::len);
    let mut out: Vec<BTreeSet<GroundAtom>> = Vec::new();
    for s in all {
        if !out.iter().any(|m| m.is_subset(&s)) {
            out.push(s);
        }
    }
    out.into_iter().collect()
}

/// Whether no disjunct is contained in another.
pub fn is_antichain(d: &Dnf) -> bool {
    d.iter().all(|a| d.iter().all(|b| a == b || !a.is_subset(b)))
}

/// The entailment condition of `alpha` from its explanation rows; absent rows
/// mean no fluent set supports `alpha`. `Axiom::falsum()` reads the
/// inconsistency rows.
pub fn detect(alpha: &Axiom, table: &ExplanationTable, iface: &FluentInterface) -> Result<DetectFormula, RewriteError> {
    let rows = if *alpha == Axiom::falsum() { Some(table.inc_rows()) } else { table.rows_for(alpha) };
    let mut sets = Vec::new();
    for fs in rows.into_iter().flatten() {
        let atoms = fs
            .iter()
            .map(|b| iface.unmap_axiom(b).ok_or_else(|| RewriteError::Unmapped(b.clone())))
            .collect::<Result<BTreeSet<_>, _>>()?;
        sets.push(atoms);
    }
    Ok(DetectFormula { target: alpha.clone(), disjuncts: minimise(sets) })
}

/// DNF of the conjunction, antichain-filtered; `None` past `cap` disjuncts.
fn conjoin(parts: &[DetectFormula], cap: usize) -> Option<Dnf> {
    let mut acc: Dnf = [BTreeSet::new()].into_iter().collect();
    for p in parts {
        let mut next = Vec::new();
        for a in &acc {
            for b in &p.disjuncts {
                next.push(a.union(b).cloned().collect::<BTreeSet<_>>());
                if next.len() > cap.saturating_mul(4) {
                    let m = minimise(std::mem::take(&mut next));
                    if m.len() > cap {
                        return None;
                    }
                    next = m.into_iter().collect();
                }
            }
        }
        acc = minimise(next);
        if acc.len() > cap {
            return None;
        }
    }
    Some(acc)
}

/// One emitted rule and where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleProvenance {
    /// The printed head atom.
    pub rule: String,
    /// The query predicate, or `None` for the inconsistency rule.
    pub query: Option<String>,
    pub candidate: Vec<String>,
    /// The instantiated query axioms, or `⊤ ⊑ ⊥`.
    pub axioms: Vec<String>,
    /// The disjuncts as printed atoms.
    pub fluent_sets: Vec<Vec<String>>,
}

fn provenance(head: &GroundAtom, query: Option<&QuerySpec>, axioms: &[Axiom], body: &Dnf) -> RuleProvenance {
    RuleProvenance {
        rule: head.to_string(),
        query: query.map(|q| q.predicate.clone()),
        candidate: head.args.clone(),
        axioms: axioms.iter().map(Axiom::to_string).collect(),
        fluent_sets: body.iter().map(|d| d.iter().map(GroundAtom::to_string).collect()).collect(),
    }
}

/// A ground rule with its DNF body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundDnfRule {
    pub head: GroundAtom,
    pub body: Dnf,
    pub provenance: RuleProvenance,
}

impl GroundDnfRule {
    pub fn to_rule(&self) -> DerivationRule {
        DerivationRule { head: Atom::ground(&self.head), body: dnf_formula(&self.body) }
    }
}

/// The explanation rows together with the axioms they were computed for.
#[derive(Clone, Debug, Default)]
pub struct Tables {
    pub table: ExplanationTable,
    pub covered: BTreeSet<Axiom>,
}

impl Tables {
    fn detect(&self, alpha: &Axiom, iface: &FluentInterface) -> Result<DetectFormula, RewriteError> {
        if !self.covered.contains(alpha) {
            return Err(RewriteError::Uncovered(alpha.clone()));
        }
        detect(alpha, &self.table, iface)
    }
}

/// Ground rules `p(c⃗) ← ⋀ detect⟨α⟩` for every candidate with a satisfiable body.
pub fn build_query_rule(
    q: &QuerySpec,
    cands: &[Vec<String>],
    tables: &Tables,
    omps: &Omps,
    cap: usize,
) -> Result<Vec<GroundDnfRule>, RewriteError> {
    let mut out = Vec::new();
    for c in cands {
        let inds: Vec<String> = c
            .iter()
            .map(|x| omps.interface.individual(x).map(str::to_string).ok_or_else(|| OmpsError::Invalid(format!("candidate `{x}` is unmapped"))))
            .collect::<Result<_, _>>()?;
        let phi = q.instantiate(&inds);
        let parts = phi.iter().map(|a| tables.detect(a, &omps.interface)).collect::<Result<Vec<_>, _>>()?;
        let head = GroundAtom { predicate: q.predicate.clone(), args: c.clone() };
        let body = conjoin(&parts, cap).ok_or_else(|| RewriteError::DisjunctCap { head: head.to_string(), cap })?;
        if body.is_empty() {
            continue;
        }
        let provenance = provenance(&head, Some(q), &phi, &body);
        out.push(GroundDnfRule { head, body, provenance });
    }
    Ok(out)
}

/// `inc ← detect⟨⊤ ⊑ ⊥⟩`, or `None` when no fluent set is inconsistent.
pub fn build_inc_rule(tables: &Tables, iface: &FluentInterface, name: &str, cap: usize) -> Result<Option<GroundDnfRule>, RewriteError> {
    let d = detect(&Axiom::falsum(), &tables.table, iface)?;
    if d.is_true() {
        return Err(RewriteError::StaticInconsistent);
    }
    if d.is_false() {
        return Ok(None);
    }
    let head = GroundAtom { predicate: name.to_string(), args: Vec::new() };
    if d.disjuncts.len() > cap {
        return Err(RewriteError::DisjunctCap { head: head.to_string(), cap });
    }
    let provenance = provenance(&head, None, &[Axiom::falsum()], &d.disjuncts);
    Ok(Some(GroundDnfRule { head, body: d.disjuncts, provenance }))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RewriteStats {
    pub justify: JustifyStats,
    pub query_axioms: usize,
    pub query_rules: usize,
    pub inc_disjuncts: usize,
    pub total_disjuncts: usize,
}

/// The compiled specification.
#[derive(Clone, Debug)]
pub struct RewrittenSpec {
    pub spec: PddlSpec,
    /// Name of the inconsistency predicate, if a rule for it was emitted.
    pub inc_predicate: Option<String>,
    pub rules: Vec<GroundDnfRule>,
    pub tables: Tables,
    pub stats: RewriteStats,
}

impl RewrittenSpec {
    pub fn provenance(&self) -> Vec<&RuleProvenance> {
        self.rules.iter().map(|r| &r.provenance).collect()
    }

    pub fn provenance_json(&self) -> String {
        serde_json::to_string_pretty(&self.provenance()).expect("provenance serialises")
    }

    /// The rule emitted for `head`, if any.
    pub fn rule_for(&self, head: &GroundAtom) -> Option<&GroundDnfRule> {
        self.rules.iter().find(|r| &r.head == head)
    }
}

fn fresh_predicate(spec: &PddlSpec, base: &str) -> String {
    let taken = |n: &str| spec.domain.predicates.iter().any(|p| p.name == n);
    if !taken(base) {
        return base.to_string();
    }
    (0..).map(|k| format!("{base}{k}")).find(|n| !taken(n)).expect("unbounded")
}

fn guarded(f: &Formula, guard: &Formula) -> Formula {
    match f {
        Formula::And(fs) => {
            let mut v = fs.clone();
            v.push(guard.clone());
            Formula::And(v)
        }
        other => Formula::And(vec![other.clone(), guard.clone()]),
    }
}

fn require(spec: &mut PddlSpec, r: &str) {
    if !spec.domain.requirements.iter().any(|x| x == r) {
        spec.domain.requirements.push(r.to_string());
    }
}

/// The explanation rows for every instantiated query axiom.
pub fn compute_tables(
    omps: &Omps,
    reasoner: &Reasoner,
    config: &RewriteConfig,
    cands: &[Vec<Vec<String>>],
) -> Result<(Tables, JustifyStats), RewriteError> {
    let mut axioms: Vec<Axiom> = Vec::new();
    let mut covered = BTreeSet::new();
    for (q, cs) in omps.queries.iter().zip(cands) {
        for c in cs {
            let inds: Vec<String> = c.iter().filter_map(|x| omps.interface.individual(x)).map(str::to_string).collect();
            for a in q.instantiate(&inds) {
                if covered.insert(a.clone()) {
                    axioms.push(a);
                }
            }
        }
    }
    let o_s: Vec<Axiom> = omps.static_ontology.iter().cloned().collect();
    let fluents = omps.fluents();
    let mut j = Justifier::new(reasoner, config.justify);
    let table = j.explain(&o_s, &fluents, &axioms, config.algorithm)?;
    Ok((Tables { table, covered }, j.stats()))
}

/// `rew(OP)`: the input specification plus the query rules, the
/// inconsistency rule and `¬Inc` guards on the goal and every action.
pub fn rew(omps: &Omps, reasoner: &Reasoner, config: &RewriteConfig) -> Result<RewrittenSpec, RewriteError> {
    if !reasoner.is_consistent(omps.static_ontology.iter())? {
        return Err(RewriteError::StaticInconsistent);
    }
    let cands: Vec<Vec<Vec<String>>> =
        omps.queries.iter().map(|q| candidates(q, omps, reasoner)).collect::<Result<_, _>>()?;
    let (tables, jstats) = compute_tables(omps, reasoner, config, &cands)?;

    let mut rules = Vec::new();
    for (q, cs) in omps.queries.iter().zip(&cands) {
        rules.extend(build_query_rule(q, cs, &tables, omps, config.disjunct_cap)?);
    }
    let query_rules = rules.len();
    let mut spec = omps.spec.clone();
    let inc_name = fresh_predicate(&spec, "inc");
    let inc = build_inc_rule(&tables, &omps.interface, &inc_name, config.disjunct_cap)?;
    let inc_disjuncts = inc.as_ref().map_or(0, |r| r.body.len());
    let inc_predicate = inc.as_ref().map(|r| r.head.predicate.clone());
    rules.extend(inc);

    if !rules.is_empty() {
        require(&mut spec, ":derived-predicates");
    }
    if rules.iter().any(|r| r.body.len() > 1) {
        require(&mut spec, ":disjunctive-preconditions");
    }
    if let Some(name) = &inc_predicate {
        require(&mut spec, ":negative-preconditions");
        spec.domain.predicates.push(PredicateDecl::new(name.clone(), Vec::<String>::new()));
        let guard = Formula::not(Formula::Atom(Atom::new(name.clone(), Vec::new())));
        for a in &mut spec.domain.actions {
            a.precondition = guarded(&a.precondition, &guard);
        }
        spec.problem.goal = guarded(&spec.problem.goal, &guard);
    }
    // ground rules live in the domain, so the objects they mention become constants
    let mut referenced: BTreeSet<&str> = BTreeSet::new();
    for r in &rules {
        referenced.extend(r.head.args.iter().map(String::as_str));
        for d in &r.body {
            for a in d {
                referenced.extend(a.args.iter().map(String::as_str));
            }
        }
    }
    let moved: Vec<String> =
        spec.problem.objects.iter().filter(|o| referenced.contains(o.as_str())).cloned().collect();
    spec.problem.objects.retain(|o| !referenced.contains(o.as_str()));
    for o in moved {
        if !spec.domain.constants.contains(&o) {
            spec.domain.constants.push(o);
        }
    }
    spec.domain.rules.extend(rules.iter().map(GroundDnfRule::to_rule));

    let stats = RewriteStats {
        justify: jstats,
        query_axioms: tables.covered.len(),
        query_rules,
        inc_disjuncts,
        total_disjuncts: rules.iter().map(|r| r.body.len()).sum(),
    };
    Ok(RewrittenSpec { spec, inc_predicate, rules, tables, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ga(p: &str, args: &[&str]) -> GroundAtom {
        GroundAtom::new(p, args.iter().copied())
    }

    fn set(atoms: &[GroundAtom]) -> BTreeSet<GroundAtom> {
        atoms.iter().cloned().collect()
    }

    #[test]
    fn conjunction_is_minimised() {
        let (a, b, c) = (ga("a", &[]), ga("b", &[]), ga("c", &[]));
        let d1 = DetectFormula { target: Axiom::falsum(), disjuncts: [set(&[a.clone()]), set(&[b.clone()])].into_iter().collect() };
        let d2 = DetectFormula { target: Axiom::falsum(), disjuncts: [set(&[a.clone()]), set(&[c.clone()])].into_iter().collect() };
        let out = conjoin(&[d1, d2], 10).unwrap();
        let want: Dnf = [set(&[a]), set(&[b, c])].into_iter().collect();
        assert_eq!(out, want);
        assert!(is_antichain(&out));
    }

    #[test]
    fn cap_aborts() {
        let parts: Vec<DetectFormula> = (0..4)
            .map(|i| DetectFormula {
                target: Axiom::falsum(),
                disjuncts: [set(&[ga("x", &[&i.to_string()])]), set(&[ga("y", &[&i.to_string()])])].into_iter().collect(),
            })
            .collect();
        assert!(conjoin(&parts, 15).is_none());
        assert_eq!(conjoin(&parts, 16).unwrap().len(), 16);
    }

    #[test]
    fn truth_and_falsity() {
        let t = DetectFormula { target: Axiom::falsum(), disjuncts: [BTreeSet::new()].into_iter().collect() };
        assert!(t.is_true());
        assert_eq!(t.to_formula(), Formula::truth());
        let f = DetectFormula { target: Axiom::falsum(), disjuncts: BTreeSet::new() };
        assert!(f.is_false());
        assert_eq!(f.to_formula(), Formula::falsity());
        assert_eq!(conjoin(&[t, f], 10).unwrap().len(), 0);
    }
}
