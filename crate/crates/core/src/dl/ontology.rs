use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};

use super::Axiom;

/// An ordered, duplicate-free axiom set with a name → occurrence index.
#[derive(Clone, Debug, Default)]
pub struct Ontology {
    axioms: IndexSet<Axiom>,
    index: HashMap<String, Vec<usize>>,
}

/// Names occurring in an ontology, in first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: IndexSet<String>,
    pub roles: IndexSet<String>,
    pub individuals: IndexSet<String>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an axiom; returns false if it was already present.
    pub fn insert(&mut self, axiom: Axiom) -> bool {
        if self.axioms.contains(&axiom) {
            return false;
        }
        let pos = self.axioms.len();
        let mut names = Vec::new();
        let mut roles = Vec::new();
        axiom.visit_names(&mut |n| names.push(n.to_string()), &mut |r| roles.push(r.to_string()));
        names.extend(roles);
        names.extend(axiom.individuals().into_iter().map(str::to_string));
        names.sort();
        names.dedup();
        for n in names {
            self.index.entry(n).or_default().push(pos);
        }
        self.axioms.insert(axiom);
        true
    }

    pub fn contains(&self, axiom: &Axiom) -> bool {
        self.axioms.contains(axiom)
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Axiom> {
        self.axioms.get_index(i)
    }

    pub fn axioms(&self) -> &IndexSet<Axiom> {
        &self.axioms
    }

    /// Positions of the axioms mentioning `name` (concept, role or individual).
    pub fn occurrences(&self, name: &str) -> &[usize] {
        self.index.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for ax in &self.axioms {
            ax.visit_names(
                &mut |c| {
                    sig.concepts.insert(c.to_string());
                },
                &mut |r| {
                    sig.roles.insert(r.to_string());
                },
            );
            for a in ax.individuals() {
                sig.individuals.insert(a.to_string());
            }
        }
        sig
    }

    pub fn tbox(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_tbox())
    }

    pub fn abox(&self) -> impl Iterator<Item = &Axiom> {
        self.axioms.iter().filter(|a| a.is_abox())
    }

    /// Axioms grouped by the individual they are about; only used for diagnostics.
    pub fn by_individual(&self) -> IndexMap<String, Vec<&Axiom>> {
        let mut out: IndexMap<String, Vec<&Axiom>> = IndexMap::new();
        for ax in &self.axioms {
            for a in ax.individuals() {
                out.entry(a.to_string()).or_default().push(ax);
            }
        }
        out
    }
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.axioms.len() == other.axioms.len() && self.axioms.iter().all(|a| other.axioms.contains(a))
    }
}

impl Eq for Ontology {}

impl FromIterator<Axiom> for Ontology {
    fn from_iter<T: IntoIterator<Item = Axiom>>(iter: T) -> Self {
        let mut o = Ontology::new();
        for a in iter {
            o.insert(a);
        }
        o
    }
}

impl Extend<Axiom> for Ontology {
    fn extend<T: IntoIterator<Item = Axiom>>(&mut self, iter: T) {
        for a in iter {
            self.insert(a);
        }
    }
}

impl<'a> IntoIterator for &'a Ontology {
    type Item = &'a Axiom;
    type IntoIter = indexmap::set::Iter<'a, Axiom>;

    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}
