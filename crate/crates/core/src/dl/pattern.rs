use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Axiom;

/// Partial map from variables to individual names.
pub type Valuation = BTreeMap<String, String>;

/// An axiom whose individual positions may hold variables.
///
/// Variables are carried as individual names listed in `vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomPattern {
    pub axiom: Axiom,
    pub vars: BTreeSet<String>,
}

impl AxiomPattern {
    pub fn new(axiom: Axiom, vars: impl IntoIterator<Item = String>) -> Self {
        AxiomPattern { axiom, vars: vars.into_iter().collect() }
    }

    /// A pattern with no variables.
    pub fn ground(axiom: Axiom) -> Self {
        AxiomPattern { axiom, vars: BTreeSet::new() }
    }

    /// Variables actually occurring in the pattern, in argument order.
    pub fn free_vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for a in self.axiom.individuals() {
            if self.vars.contains(a) && !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Substitutes the bound variables; unbound ones stay variables.
    pub fn apply(&self, val: &Valuation) -> AxiomPattern {
        let axiom = self.axiom.map_individuals(|a| match (self.vars.contains(a), val.get(a)) {
            (true, Some(v)) => v.clone(),
            _ => a.to_string(),
        });
        let vars = self.vars.iter().filter(|v| !val.contains_key(*v)).cloned().collect();
        AxiomPattern { axiom, vars }
    }

    /// Instantiates with a valuation that must bind every free variable.
    pub fn instantiate(&self, val: &Valuation) -> Option<Axiom> {
        let p = self.apply(val);
        if p.is_ground() {
            Some(p.axiom)
        } else {
            None
        }
    }

    /// Replaces every individual of `axioms` by a distinct variable `?x0, ?x1, ...`,
    /// numbered by first occurrence. Returns the patterns and the valuation
    /// that maps them back.
    pub fn abstract_set<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> (Vec<AxiomPattern>, Valuation) {
        let axioms: Vec<&Axiom> = axioms.into_iter().collect();
        let mut names: BTreeMap<String, String> = BTreeMap::new();
        let mut order: Vec<String> = Vec::new();
        for ax in &axioms {
            for a in ax.individuals() {
                if !names.contains_key(a) {
                    let v = format!("?x{}", order.len());
                    names.insert(a.to_string(), v);
                    order.push(a.to_string());
                }
            }
        }
        let vars: BTreeSet<String> = names.values().cloned().collect();
        let pats = axioms
            .iter()
            .map(|ax| AxiomPattern {
                axiom: raw_rename(ax, |a| names[a].clone()),
                vars: vars.clone(),
            })
            .collect();
        let back = names.into_iter().map(|(ind, var)| (var, ind)).collect();
        (pats, back)
    }
}

/// Renaming that keeps argument order; symmetric forms are not re-sorted so
/// the pattern lines up position-wise with its source axiom.
fn raw_rename(ax: &Axiom, f: impl Fn(&str) -> String) -> Axiom {
    match ax {
        Axiom::SameIndividual(a, b) => Axiom::SameIndividual(f(a), f(b)),
        Axiom::DifferentIndividuals(a, b) => Axiom::DifferentIndividuals(f(a), f(b)),
        other => other.map_individuals(f),
    }
}

impl fmt::Display for AxiomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.axiom)
    }
}
