use std::collections::{BTreeMap, BTreeSet};

use crate::dl::Axiom;

pub type FluentSet = BTreeSet<Axiom>;

/// Inserts `s` into an antichain: dropped if a subset is present, and
/// strict supersets are evicted.
pub(crate) fn antichain_insert(family: &mut BTreeSet<FluentSet>, s: FluentSet) -> bool {
    if family.iter().any(|x| x.is_subset(&s)) {
        return false;
    }
    family.retain(|x| !s.is_subset(x));
    family.insert(s);
    true
}

pub(crate) fn antichain(sets: impl IntoIterator<Item = FluentSet>) -> BTreeSet<FluentSet> {
    let mut v: Vec<FluentSet> = sets.into_iter().collect();
    v.sort_by_key(|s| s.len());
    let mut out = BTreeSet::new();
    for s in v {
        antichain_insert(&mut out, s);
    }
    out
}

/// Minimal fluent sets per query, plus the minimal inconsistent fluent sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplanationTable {
    rows: BTreeMap<Axiom, BTreeSet<FluentSet>>,
    inc: BTreeSet<FluentSet>,
}

impl ExplanationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_row(&mut self, query: Axiom, fluents: FluentSet) -> bool {
        antichain_insert(self.rows.entry(query).or_default(), fluents)
    }

    pub fn add_inc(&mut self, fluents: FluentSet) -> bool {
        antichain_insert(&mut self.inc, fluents)
    }

    pub fn rows_for(&self, query: &Axiom) -> Option<&BTreeSet<FluentSet>> {
        self.rows.get(query)
    }

    pub fn inc_rows(&self) -> &BTreeSet<FluentSet> {
        &self.inc
    }

    pub fn queries(&self) -> impl Iterator<Item = &Axiom> {
        self.rows.keys()
    }

    /// All rows; `None` marks inconsistency rows.
    pub fn iter(&self) -> impl Iterator<Item = (Option<&Axiom>, &FluentSet)> {
        self.rows
            .iter()
            .flat_map(|(q, sets)| sets.iter().map(move |s| (Some(q), s)))
            .chain(self.inc.iter().map(|s| (None, s)))
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(BTreeSet::len).sum::<usize>() + self.inc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn merge(&mut self, other: ExplanationTable) {
        for (q, sets) in other.rows {
            for s in sets {
                self.add_row(q.clone(), s);
            }
        }
        for s in other.inc {
            self.add_inc(s);
        }
    }

    /// Whether every per-query family and the inconsistency family are antichains.
    pub fn is_antichain(&self) -> bool {
        let ok = |f: &BTreeSet<FluentSet>| {
            f.iter().all(|a| f.iter().all(|b| a == b || !a.is_subset(b)))
        };
        self.rows.values().all(ok) && ok(&self.inc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::Concept;

    fn fs(names: &[&str]) -> FluentSet {
        names.iter().map(|n| Axiom::class(Concept::name(*n), "a")).collect()
    }

    #[test]
    fn rows_stay_minimal() {
        let q = Axiom::class(Concept::name("C"), "a");
        let mut t = ExplanationTable::new();
        assert!(t.add_row(q.clone(), fs(&["A", "B"])));
        assert!(!t.add_row(q.clone(), fs(&["A", "B", "D"])));
        assert!(t.add_row(q.clone(), fs(&["A"])));
        assert_eq!(t.rows_for(&q).unwrap().len(), 1);
        assert!(t.is_antichain());
    }

    #[test]
    fn inc_rows_are_separate() {
        let q = Axiom::class(Concept::name("C"), "a");
        let mut t = ExplanationTable::new();
        t.add_row(q, fs(&["A"]));
        t.add_inc(fs(&["A", "B"]));
        assert_eq!(t.len(), 2);
        assert_eq!(t.iter().filter(|(q, _)| q.is_none()).count(), 1);
    }
}
