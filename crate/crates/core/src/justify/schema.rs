//! Justification schemas: justifications abstracted over their individuals,
//! re-instantiated by syntactic matching.

use std::collections::{BTreeSet, HashMap};

use crate::dl::{Axiom, AxiomPattern, Valuation};

/// Axiom patterns together with the valuations known to instantiate them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JustificationSchema {
    pub patterns: Vec<AxiomPattern>,
    pub valuations: Vec<Valuation>,
}

impl JustificationSchema {
    /// Abstracts a justification; its own valuation is the first one.
    pub fn abstract_from<'a>(j: impl IntoIterator<Item = &'a Axiom>) -> Self {
        let (patterns, back) = AxiomPattern::abstract_set(j);
        JustificationSchema { patterns, valuations: vec![back] }
    }

    pub fn instantiate(&self, val: &Valuation) -> Option<Vec<Axiom>> {
        self.patterns.iter().map(|p| p.instantiate(val)).collect()
    }

    /// Injective valuations `val` with `val(patterns) ⊆ ontology`, found by
    /// syntactic matching only.
    pub fn matches(&self, ontology: &MatchIndex) -> Vec<Valuation> {
        let mut order: Vec<&AxiomPattern> = self.patterns.iter().filter(|p| !p.is_ground()).collect();
        if self.patterns.iter().filter(|p| p.is_ground()).any(|p| !ontology.pos.contains_key(&p.axiom)) {
            return Vec::new();
        }
        order.sort_by_key(|p| ontology.candidates(&p.axiom).len());
        let mut out = Vec::new();
        let mut val = Valuation::new();
        let mut used = BTreeSet::new();
        search(ontology, &order, 0, &mut val, &mut used, &mut out);
        out
    }
}

fn shape(ax: &Axiom) -> Axiom {
    ax.map_individuals(|_| "_".to_string())
}

/// Shape index over an axiom list for syntactic matching.
#[derive(Clone, Debug, Default)]
pub struct MatchIndex {
    by_shape: HashMap<Axiom, Vec<u32>>,
    pub(crate) pos: HashMap<Axiom, u32>,
    axioms: Vec<Axiom>,
}

impl MatchIndex {
    pub fn new(axioms: &[Axiom]) -> Self {
        let mut idx = MatchIndex { axioms: axioms.to_vec(), ..Default::default() };
        for (i, ax) in axioms.iter().enumerate() {
            idx.pos.insert(ax.clone(), i as u32);
            if ax.is_abox() {
                idx.by_shape.entry(shape(ax)).or_default().push(i as u32);
            }
        }
        idx
    }

    fn candidates(&self, pattern: &Axiom) -> &[u32] {
        self.by_shape.get(&shape(pattern)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn position(&self, ax: &Axiom) -> Option<u32> {
        self.pos.get(ax).copied()
    }
}

fn search(
    idx: &MatchIndex,
    pats: &[&AxiomPattern],
    i: usize,
    val: &mut Valuation,
    used: &mut BTreeSet<String>,
    out: &mut Vec<Valuation>,
) {
    if i == pats.len() {
        out.push(val.clone());
        return;
    }
    let p = pats[i];
    let vars: Vec<&str> = p.axiom.individuals();
    let symmetric = matches!(p.axiom, Axiom::SameIndividual(..) | Axiom::DifferentIndividuals(..));
    for &c in idx.candidates(&p.axiom) {
        let args: Vec<&str> = idx.axioms[c as usize].individuals();
        let mut orders = vec![args.clone()];
        if symmetric && args.len() == 2 && args[0] != args[1] {
            orders.push(vec![args[1], args[0]]);
        }
        for target in orders {
            let mut bound: Vec<String> = Vec::new();
            let mut ok = true;
            for (v, t) in vars.iter().zip(&target) {
                match val.get(*v) {
                    Some(b) if b == t => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                    None => {
                        if used.contains(*t) {
                            ok = false;
                            break;
                        }
                        val.insert(v.to_string(), t.to_string());
                        used.insert(t.to_string());
                        bound.push(v.to_string());
                    }
                }
            }
            if ok {
                search(idx, pats, i + 1, val, used, out);
            }
            for v in bound {
                if let Some(t) = val.remove(&v) {
                    used.remove(&t);
                }
            }
        }
    }
}
