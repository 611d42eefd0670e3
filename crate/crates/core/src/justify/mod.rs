//! Justification enumeration: SingleJust, hitting-set trees, and the
//! per-query, concept-batched and schema-leveraging explanation routes.

mod hst;
mod schema;
mod single;
mod table;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::dl::{Axiom, Concept, DlError};
use crate::reasoner::{Reasoner, ReasonerError, ReasonerStats};

use hst::{Branching, Hst, HstOptions};
pub use schema::{JustificationSchema, MatchIndex};
pub use table::{ExplanationTable, FluentSet};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum JustifyError {
    #[error("no justification exists: the axioms are consistent")]
    NoJustification,
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Dl(#[from] DlError),
    #[error("queries do not share one concept: {0} and {1}")]
    NonUniformConcept(String, String),
    #[error("brute-force enumeration is limited to 20 fluents, got {0}")]
    TooManyFluents(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Basic,
    #[default]
    Concept,
    Schema,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Basic, Algorithm::Concept, Algorithm::Schema];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Basic => "basic",
            Algorithm::Concept => "concept",
            Algorithm::Schema => "schema",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Algorithm::Basic),
            "concept" => Ok(Algorithm::Concept),
            "schema" => Ok(Algorithm::Schema),
            other => Err(format!("unknown algorithm `{other}` (expected basic, concept or schema)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct JustifyConfig {
    pub figure4_pruning: bool,
    pub path_pruning: bool,
    pub concurrent: bool,
}

impl Default for JustifyConfig {
    fn default() -> Self {
        JustifyConfig { figure4_pruning: true, path_pruning: true, concurrent: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct JustifyStats {
    pub consistency_calls: u64,
    pub single_just_calls: u64,
    pub hst_nodes: u64,
    pub tableau_nodes: u64,
    pub audit_calls: u64,
}

/// One justification of `axioms`, in input order.
///
/// Assertions are dropped first, newest first, then TBox axioms.
pub fn single_just(axioms: &[Axiom], reasoner: &Reasoner) -> Result<Vec<Axiom>, JustifyError> {
    let current: Vec<u32> = (0..axioms.len() as u32).collect();
    let fluent = |i: u32| axioms[i as usize].is_abox();
    let j = single::single_just_idx(axioms, &current, &fluent, &single::reasoner_check(axioms, reasoner), false)?;
    Ok(j.into_iter().map(|i| axioms[i as usize].clone()).collect())
}

/// Fresh concept name outside the signature of the given axioms.
fn fresh_concept(taken: &HashSet<String>, base: &str) -> String {
    let mut k = 0usize;
    loop {
        let name = format!("{base}{k}");
        if !taken.contains(&name) {
            return name;
        }
        k += 1;
    }
}

fn signature_names<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> HashSet<String> {
    let mut out = HashSet::new();
    for ax in axioms {
        let mut names = Vec::new();
        let mut roles = Vec::new();
        ax.visit_names(&mut |c| names.push(c.to_string()), &mut |r| roles.push(r.to_string()));
        out.extend(names);
        out.extend(roles);
        out.extend(ax.individuals().into_iter().map(str::to_string));
    }
    out
}

/// Universe assembled from parts, duplicates dropped, with branch flags.
struct Universe {
    axioms: Vec<Axiom>,
    branchable: Vec<bool>,
    index: HashMap<Axiom, u32>,
}

impl Universe {
    fn new() -> Self {
        Universe { axioms: Vec::new(), branchable: Vec::new(), index: HashMap::new() }
    }

    fn push(&mut self, ax: &Axiom, branchable: bool) -> u32 {
        if let Some(&p) = self.index.get(ax) {
            return p;
        }
        let p = self.axioms.len() as u32;
        self.axioms.push(ax.clone());
        self.branchable.push(branchable);
        self.index.insert(ax.clone(), p);
        p
    }

    fn position(&self, ax: &Axiom) -> Option<u32> {
        self.index.get(ax).copied()
    }

    fn fluent_part(&self, j: &[u32], fluent: &HashSet<u32>) -> FluentSet {
        j.iter().filter(|i| fluent.contains(i)).map(|&i| self.axioms[i as usize].clone()).collect()
    }
}

/// Justification engine bound to a reasoner; accumulates statistics.
pub struct Justifier<'r> {
    reasoner: &'r Reasoner,
    config: JustifyConfig,
    audit: Reasoner,
    base: ReasonerStats,
    single_just: u64,
    hst_nodes: u64,
}

impl<'r> Justifier<'r> {
    pub fn new(reasoner: &'r Reasoner, config: JustifyConfig) -> Self {
        Justifier {
            reasoner,
            config,
            audit: Reasoner::new(reasoner.config()),
            base: reasoner.stats(),
            single_just: 0,
            hst_nodes: 0,
        }
    }

    pub fn config(&self) -> JustifyConfig {
        self.config
    }

    pub fn stats(&self) -> JustifyStats {
        let now = self.reasoner.stats();
        JustifyStats {
            consistency_calls: now.consistency_calls - self.base.consistency_calls,
            single_just_calls: self.single_just,
            hst_nodes: self.hst_nodes,
            tableau_nodes: now.tableau_nodes - self.base.tableau_nodes,
            audit_calls: self.audit.stats().consistency_calls,
        }
    }

    fn run(&mut self, u: &Universe, branching: Branching, schema: bool, seeds: Vec<Vec<u32>>) -> Result<Vec<Vec<u32>>, JustifyError> {
        let hst = Hst::new(
            &u.axioms,
            u.branchable.clone(),
            branching,
            self.reasoner,
            &self.audit,
            HstOptions { path_pruning: self.config.path_pruning, concurrent: self.config.concurrent, schema },
        );
        hst.seed(seeds);
        let out = hst.run()?;
        self.hst_nodes += out.nodes;
        self.single_just += out.single_just_calls;
        Ok(out.justifications)
    }

    /// Minimal `F ⊆ f` with `o ∪ F` inconsistent.
    pub fn all_justifications_basic(&mut self, o: &[Axiom], f: &[Axiom]) -> Result<BTreeSet<FluentSet>, JustifyError> {
        self.inconsistency_sets(o, f, false)
    }

    fn inconsistency_sets(&mut self, o: &[Axiom], f: &[Axiom], schema: bool) -> Result<BTreeSet<FluentSet>, JustifyError> {
        let mut u = Universe::new();
        for a in o {
            u.push(a, false);
        }
        let fluent: HashSet<u32> = f.iter().filter(|a| !o.contains(a)).map(|a| u.push(a, true)).collect();
        let js = self.run(&u, Branching::Plain, schema, Vec::new())?;
        Ok(table::antichain(js.iter().map(|j| u.fluent_part(j, &fluent))))
    }

    /// Minimal `F ⊆ f` with `o_s ∪ F ⊨ alpha`, via the justifications of
    /// `o_s ∪ f ∪ {¬alpha}`.
    pub fn explain_query_basic(&mut self, o_s: &[Axiom], f: &[Axiom], alpha: &Axiom) -> Result<BTreeSet<FluentSet>, JustifyError> {
        let neg = alpha.negate_assertion()?;
        let mut u = Universe::new();
        for a in o_s {
            u.push(a, false);
        }
        u.push(&neg, false);
        let fluent: HashSet<u32> = f
            .iter()
            .filter(|a| !o_s.contains(a) && **a != neg)
            .map(|a| u.push(a, true))
            .collect();
        let js = self.run(&u, Branching::Plain, false, Vec::new())?;
        Ok(table::antichain(js.iter().map(|j| u.fluent_part(j, &fluent))))
    }

    /// One marker-augmented tree for the queries `C(a)` sharing concept `C`.
    /// Inconsistency justifications found here are appended to `inc_seed`
    /// and reused by later batches.
    fn concept_batch(
        &mut self,
        o_s: &[Axiom],
        f: &[Axiom],
        concept: &Concept,
        queries: &[Axiom],
        schema: bool,
        inc_seed: &mut Vec<Vec<Axiom>>,
        table: &mut ExplanationTable,
    ) -> Result<(), JustifyError> {
        let taken = signature_names(o_s.iter().chain(f).chain(queries));
        let marker = fresh_concept(&taken, "QueryMarker");
        let mut u = Universe::new();
        for a in o_s {
            u.push(a, false);
        }
        let disjointness = u.push(&Axiom::sub(Concept::and([concept.clone(), Concept::name(marker.clone())]), Concept::Bottom), false);
        let fluent: HashSet<u32> = f.iter().filter(|a| !o_s.contains(a)).map(|a| u.push(a, true)).collect();
        let mut markers: Vec<(u32, &Axiom)> = Vec::new();
        for q in queries {
            let Axiom::ClassAssertion(_, a) = q else { unreachable!("batched queries are class assertions") };
            markers.push((u.push(&Axiom::class(Concept::name(marker.clone()), a.clone()), true), q));
        }
        let mut marker_ids: Vec<u32> = markers.iter().map(|m| m.0).collect();
        marker_ids.sort_unstable();
        let branching = if self.config.figure4_pruning {
            Branching::Marker { disjointness, markers: marker_ids.clone() }
        } else {
            Branching::Plain
        };
        let seeds: Vec<Vec<u32>> = inc_seed
            .iter()
            .filter_map(|j| {
                let mut idx: Vec<u32> = j.iter().map(|a| u.position(a)).collect::<Option<_>>()?;
                idx.sort_unstable();
                Some(idx)
            })
            .collect();
        let js = self.run(&u, branching, schema, seeds)?;

        let mut inc: Vec<FluentSet> = Vec::new();
        let mut per_query: Vec<(usize, FluentSet)> = Vec::new();
        for j in &js {
            let own: Vec<usize> = markers.iter().enumerate().filter(|(_, m)| j.binary_search(&m.0).is_ok()).map(|(k, _)| k).collect();
            let fs = u.fluent_part(j, &fluent);
            match own.len() {
                0 => {
                    inc.push(fs);
                    let axioms: Vec<Axiom> = j.iter().map(|&i| u.axioms[i as usize].clone()).collect();
                    if !inc_seed.contains(&axioms) && !j.contains(&disjointness) {
                        inc_seed.push(axioms);
                    }
                }
                1 => per_query.push((own[0], fs)),
                _ => {}
            }
        }
        for (k, fs) in per_query {
            table.add_row(markers[k].1.clone(), fs);
        }
        for fs in inc {
            for (_, q) in &markers {
                table.add_row((*q).clone(), fs.clone());
            }
            table.add_inc(fs);
        }
        Ok(())
    }

    fn batched(&mut self, o_s: &[Axiom], f: &[Axiom], queries: &[Axiom], schema: bool) -> Result<ExplanationTable, JustifyError> {
        let mut table = ExplanationTable::new();
        let mut groups: IndexMap<Concept, Vec<Axiom>> = IndexMap::new();
        let mut others: Vec<&Axiom> = Vec::new();
        for q in queries {
            match q {
                Axiom::ClassAssertion(c, _) => {
                    let g = groups.entry(c.clone()).or_default();
                    if !g.contains(q) {
                        g.push(q.clone());
                    }
                }
                _ => others.push(q),
            }
        }
        let mut inc_seed: Vec<Vec<Axiom>> = Vec::new();
        if groups.is_empty() {
            for fs in self.inconsistency_sets(o_s, f, schema)? {
                table.add_inc(fs);
            }
        }
        for (c, qs) in &groups {
            self.concept_batch(o_s, f, c, qs, schema, &mut inc_seed, &mut table)?;
        }
        for q in others {
            for fs in self.explain_query_basic(o_s, f, q)? {
                table.add_row(q.clone(), fs);
            }
        }
        Ok(table)
    }

    fn uniform(queries: &[Axiom]) -> Result<(), JustifyError> {
        let mut first: Option<Concept> = None;
        for q in queries {
            if let Axiom::ClassAssertion(c, _) = q.as_concept_assertion()? {
                match &first {
                    None => first = Some(c),
                    Some(f) if *f != c => return Err(JustifyError::NonUniformConcept(f.to_string(), c.to_string())),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Concept-based route for class assertions sharing one concept.
    pub fn explain_queries_concept(&mut self, o_s: &[Axiom], f: &[Axiom], queries: &[Axiom]) -> Result<ExplanationTable, JustifyError> {
        Self::uniform(queries)?;
        self.batched(o_s, f, queries, false)
    }

    /// Concept-based route with schema instantiation; queries may span
    /// several concepts, one tree per concept.
    pub fn explain_queries_schema(&mut self, o_s: &[Axiom], f: &[Axiom], queries: &[Axiom]) -> Result<ExplanationTable, JustifyError> {
        for q in queries {
            q.as_concept_assertion()?;
        }
        self.batched(o_s, f, queries, true)
    }

    /// Full explanation table for arbitrary ABox queries.
    ///
    /// The batched routes group class assertions by concept; other queries
    /// go through the per-query route.
    pub fn explain(&mut self, o_s: &[Axiom], f: &[Axiom], queries: &[Axiom], algorithm: Algorithm) -> Result<ExplanationTable, JustifyError> {
        match algorithm {
            Algorithm::Basic => {
                let mut table = ExplanationTable::new();
                for q in queries {
                    for fs in self.explain_query_basic(o_s, f, q)? {
                        table.add_row(q.clone(), fs);
                    }
                }
                for fs in self.all_justifications_basic(o_s, f)? {
                    table.add_inc(fs);
                }
                Ok(table)
            }
            Algorithm::Concept => self.batched(o_s, f, queries, false),
            Algorithm::Schema => self.batched(o_s, f, queries, true),
        }
    }
}

/// Reference table by enumerating every fluent subset.
pub fn brute_force_explanations(o_s: &[Axiom], f: &[Axiom], queries: &[Axiom], reasoner: &Reasoner) -> Result<ExplanationTable, JustifyError> {
    let n = f.len();
    if n > 20 {
        return Err(JustifyError::TooManyFluents(n));
    }
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut table = ExplanationTable::new();
    let mut inc: Vec<u32> = Vec::new();
    let mut hits: Vec<Vec<u32>> = vec![Vec::new(); queries.len()];
    for m in masks {
        if inc.iter().any(|x| x & m == *x) {
            continue;
        }
        let subset: Vec<&Axiom> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| &f[i]).collect();
        let fs: FluentSet = subset.iter().map(|a| (*a).clone()).collect();
        if !reasoner.is_consistent(o_s.iter().chain(subset.iter().copied()))? {
            inc.push(m);
            table.add_inc(fs.clone());
            for (k, q) in queries.iter().enumerate() {
                if !hits[k].iter().any(|x| x & m == *x) {
                    hits[k].push(m);
                    table.add_row(q.clone(), fs.clone());
                }
            }
            continue;
        }
        for (k, q) in queries.iter().enumerate() {
            if hits[k].iter().any(|x| x & m == *x) {
                continue;
            }
            if reasoner.entails(o_s.iter().chain(subset.iter().copied()), q)? {
                hits[k].push(m);
                table.add_row(q.clone(), fs.clone());
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::parse_axiom;

    fn ax(s: &str) -> Axiom {
        parse_axiom(s).unwrap()
    }

    fn twins() -> (Vec<Axiom>, Vec<Axiom>, Vec<Axiom>) {
        let o_s = vec![ax("SubClassOf(ObjectIntersectionOf(A B) C)")];
        let f = vec![ax("ClassAssertion(A a)"), ax("ClassAssertion(B a)"), ax("ClassAssertion(A b)"), ax("ClassAssertion(B b)")];
        let q = vec![ax("ClassAssertion(C a)"), ax("ClassAssertion(C b)")];
        (o_s, f, q)
    }

    fn set(xs: &[&str]) -> FluentSet {
        xs.iter().map(|s| ax(s)).collect()
    }

    #[test]
    fn single_just_example() {
        let axioms = vec![
            ax("SubClassOf(ObjectIntersectionOf(A B) C)"),
            ax("SubClassOf(ObjectIntersectionOf(C AC) owl:Nothing)"),
            ax("ClassAssertion(A a)"),
            ax("ClassAssertion(B a)"),
            ax("ClassAssertion(AC a)"),
            ax("ClassAssertion(A b)"),
        ];
        let j = single_just(&axioms, &Reasoner::default()).unwrap();
        assert_eq!(j, axioms[..5].to_vec());
    }

    #[test]
    fn single_just_trivial_and_consistent() {
        let r = Reasoner::default();
        let j = single_just(&[Axiom::falsum(), ax("ClassAssertion(A a)")], &r).unwrap();
        assert_eq!(j, vec![Axiom::falsum()]);
        assert_eq!(single_just(&[ax("ClassAssertion(A a)")], &r), Err(JustifyError::NoJustification));
    }

    #[test]
    fn basic_inconsistency_sets() {
        let r = Reasoner::default();
        let mut j = Justifier::new(&r, JustifyConfig::default());
        let o = vec![ax("SubClassOf(ObjectIntersectionOf(A B) owl:Nothing)")];
        let f = vec![ax("ClassAssertion(A a)"), ax("ClassAssertion(B a)")];
        let out = j.all_justifications_basic(&o, &f).unwrap();
        assert_eq!(out, BTreeSet::from([set(&["ClassAssertion(A a)", "ClassAssertion(B a)"])]));
        let none = j.all_justifications_basic(&[], &f).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn basic_query_route() {
        let r = Reasoner::default();
        let mut j = Justifier::new(&r, JustifyConfig::default());
        let (o_s, f, _) = twins();
        let out = j.explain_query_basic(&o_s, &f[..2], &ax("ClassAssertion(C a)")).unwrap();
        assert_eq!(out, BTreeSet::from([set(&["ClassAssertion(A a)", "ClassAssertion(B a)"])]));
        let statically = j.explain_query_basic(&[ax("SubClassOf(owl:Thing C)")], &f, &ax("ClassAssertion(C a)")).unwrap();
        assert_eq!(statically, BTreeSet::from([FluentSet::new()]));
    }

    #[test]
    fn twins_concept_rows_and_node_counts() {
        let (o_s, f, q) = twins();
        let r = Reasoner::default();
        let expected = {
            let mut t = ExplanationTable::new();
            t.add_row(q[0].clone(), set(&["ClassAssertion(A a)", "ClassAssertion(B a)"]));
            t.add_row(q[1].clone(), set(&["ClassAssertion(A b)", "ClassAssertion(B b)"]));
            t
        };
        for (fig4, nodes) in [(true, 7), (false, 13)] {
            let cfg = JustifyConfig { figure4_pruning: fig4, path_pruning: false, concurrent: false };
            let mut j = Justifier::new(&r, cfg);
            let t = j.explain_queries_concept(&o_s, &f, &q).unwrap();
            assert_eq!(t, expected);
            assert_eq!(j.stats().hst_nodes, nodes);
        }
    }

    #[test]
    fn schema_saves_single_just_calls() {
        let (o_s, f, q) = twins();
        let r = Reasoner::default();
        let mut c = Justifier::new(&r, JustifyConfig::default());
        let tc = c.explain_queries_concept(&o_s, &f, &q).unwrap();
        let r2 = Reasoner::default();
        let mut s = Justifier::new(&r2, JustifyConfig::default());
        let ts = s.explain_queries_schema(&o_s, &f, &q).unwrap();
        assert_eq!(tc, ts);
        assert_eq!(s.stats().single_just_calls, 1);
        assert_eq!(c.stats().single_just_calls, 2);
    }

    #[test]
    fn non_uniform_concepts_rejected() {
        let r = Reasoner::default();
        let mut j = Justifier::new(&r, JustifyConfig::default());
        let q = vec![ax("ClassAssertion(C a)"), ax("ClassAssertion(D b)")];
        assert!(matches!(j.explain_queries_concept(&[], &[], &q), Err(JustifyError::NonUniformConcept(..))));
        let role = vec![ax("ObjectPropertyAssertion(r a b)")];
        assert!(matches!(j.explain_queries_concept(&[], &[], &role), Err(JustifyError::Dl(DlError::RequiresConceptAssertion(_)))));
    }

    #[test]
    fn brute_force_matches_twins() {
        let (o_s, f, q) = twins();
        let r = Reasoner::default();
        let t = brute_force_explanations(&o_s, &f, &q, &r).unwrap();
        let mut j = Justifier::new(&r, JustifyConfig::default());
        assert_eq!(t, j.explain_queries_concept(&o_s, &f, &q).unwrap());
        let empty = brute_force_explanations(&o_s, &[], &q, &r).unwrap();
        assert!(empty.is_empty());
    }
}
