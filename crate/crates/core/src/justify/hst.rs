//! Hitting-set tree over an indexed axiom universe.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::dl::Axiom;
use crate::reasoner::Reasoner;

use super::schema::{JustificationSchema, MatchIndex};
use super::single::single_just_idx;
use super::JustifyError;

pub(crate) enum Branching {
    /// One branch per branchable axiom of the justification.
    Plain,
    /// Query-marker aware branching: a branch removing the marker assertion
    /// `A_C(a)` of the justification, and branches removing one other axiom
    /// together with every other marker assertion.
    Marker { disjointness: u32, markers: Vec<u32> },
}

pub(crate) struct HstOptions {
    pub path_pruning: bool,
    pub concurrent: bool,
    pub schema: bool,
}

#[derive(Default)]
struct Shared {
    store: Vec<Vec<u32>>,
    known: HashSet<Vec<u32>>,
    closed: Vec<Vec<u32>>,
    expanded: HashSet<Vec<u32>>,
}

pub(crate) struct Hst<'a> {
    universe: &'a [Axiom],
    branchable: Vec<bool>,
    branching: Branching,
    reasoner: &'a Reasoner,
    audit: &'a Reasoner,
    opts: HstOptions,
    index: Option<MatchIndex>,
    shared: Mutex<Shared>,
    memo: Mutex<HashMap<Vec<u32>, bool>>,
    nodes: AtomicU64,
    single_just: AtomicU64,
}

pub(crate) struct HstRun {
    /// Every justification found or verified, in discovery order.
    pub justifications: Vec<Vec<u32>>,
    pub nodes: u64,
    pub single_just_calls: u64,
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_err())
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl<'a> Hst<'a> {
    pub fn new(
        universe: &'a [Axiom],
        branchable: Vec<bool>,
        branching: Branching,
        reasoner: &'a Reasoner,
        audit: &'a Reasoner,
        opts: HstOptions,
    ) -> Self {
        let index = opts.schema.then(|| MatchIndex::new(universe));
        Hst {
            universe,
            branchable,
            branching,
            reasoner,
            audit,
            opts,
            index,
            shared: Mutex::new(Shared::default()),
            memo: Mutex::new(HashMap::new()),
            nodes: AtomicU64::new(0),
            single_just: AtomicU64::new(0),
        }
    }

    /// Pre-loads justifications known to hold in this universe.
    pub fn seed(&self, js: impl IntoIterator<Item = Vec<u32>>) {
        let mut sh = self.shared.lock().unwrap();
        for j in js {
            if sh.known.insert(j.clone()) {
                sh.store.push(j);
            }
        }
    }

    pub fn run(self) -> Result<HstRun, JustifyError> {
        self.node(Vec::new())?;
        let sh = self.shared.into_inner().unwrap();
        Ok(HstRun {
            justifications: sh.store,
            nodes: self.nodes.into_inner(),
            single_just_calls: self.single_just.into_inner(),
        })
    }

    /// Memoised consistency of a sorted index set.
    fn consistent(&self, idx: &[u32]) -> Result<bool, JustifyError> {
        if let Some(&v) = self.memo.lock().unwrap().get(idx) {
            return Ok(v);
        }
        let v = self.reasoner.is_consistent(idx.iter().map(|&i| &self.universe[i as usize]))?;
        self.memo.lock().unwrap().insert(idx.to_vec(), v);
        Ok(v)
    }

    fn node(&self, path: Vec<u32>) -> Result<(), JustifyError> {
        if self.opts.path_pruning {
            let mut sh = self.shared.lock().unwrap();
            if sh.closed.iter().any(|c| is_subset(c, &path)) || !sh.expanded.insert(path.clone()) {
                return Ok(());
            }
        }
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let reuse = {
            let sh = self.shared.lock().unwrap();
            sh.store.iter().rev().find(|j| disjoint(j, &path)).cloned()
        };
        let j = match reuse {
            Some(j) => j,
            None => {
                let current: Vec<u32> =
                    (0..self.universe.len() as u32).filter(|i| path.binary_search(i).is_err()).collect();
                if self.consistent(&current)? {
                    if self.opts.path_pruning {
                        self.shared.lock().unwrap().closed.push(path);
                    }
                    return Ok(());
                }
                let branchable = |i: u32| self.branchable[i as usize];
                let j = single_just_idx(self.universe, &current, &branchable, &|idx| self.consistent(idx), true)?;
                self.single_just.fetch_add(1, Ordering::Relaxed);
                self.record(j.clone());
                if self.index.is_some() {
                    self.instantiate(&j)?;
                }
                j
            }
        };
        debug_assert!(disjoint(&j, &path), "node justification intersects its path");
        let succ = self.successors(&j);
        if self.opts.concurrent {
            succ.into_par_iter().try_for_each(|b| self.node(union(&path, &b)))
        } else {
            for b in succ {
                self.node(union(&path, &b))?;
            }
            Ok(())
        }
    }

    fn record(&self, j: Vec<u32>) -> bool {
        let mut sh = self.shared.lock().unwrap();
        if sh.known.insert(j.clone()) {
            sh.store.push(j);
            true
        } else {
            false
        }
    }

    /// Adds the verified renamings of `j` to the store.
    fn instantiate(&self, j: &[u32]) -> Result<(), JustifyError> {
        let index = self.index.as_ref().expect("schema index");
        let axioms: Vec<&Axiom> = j.iter().map(|&i| &self.universe[i as usize]).collect();
        let schema = JustificationSchema::abstract_from(axioms);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for val in schema.matches(index) {
            let Some(inst) = schema.instantiate(&val) else { continue };
            let mut idx: Vec<u32> = inst.iter().filter_map(|a| index.position(a)).collect();
            if idx.len() != inst.len() {
                continue;
            }
            idx.sort_unstable();
            idx.dedup();
            if idx == j || !seen.insert(idx.clone()) || self.shared.lock().unwrap().known.contains(&idx) {
                continue;
            }
            if self.consistent(&idx)? {
                continue;
            }
            if cfg!(debug_assertions) && !self.audit_minimal(&idx)? {
                continue;
            }
            self.record(idx);
        }
        Ok(())
    }

    fn audit_minimal(&self, idx: &[u32]) -> Result<bool, JustifyError> {
        for skip in 0..idx.len() {
            let rest = idx.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| &self.universe[i as usize]);
            if !self.audit.is_consistent(rest)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn successors(&self, j: &[u32]) -> Vec<Vec<u32>> {
        let plain = || j.iter().filter(|&&i| self.branchable[i as usize]).map(|&i| vec![i]).collect();
        match &self.branching {
            Branching::Plain => plain(),
            Branching::Marker { disjointness, markers } => {
                if j.binary_search(disjointness).is_err() {
                    return plain();
                }
                let own: Vec<u32> = j.iter().copied().filter(|i| markers.binary_search(i).is_ok()).collect();
                if own.len() != 1 {
                    return plain();
                }
                let a = own[0];
                let others: Vec<u32> = markers.iter().copied().filter(|&m| m != a).collect();
                let mut out: Vec<Vec<u32>> = j
                    .iter()
                    .copied()
                    .filter(|&i| self.branchable[i as usize] && markers.binary_search(&i).is_err())
                    .map(|i| union(&[i], &others))
                    .collect();
                out.push(vec![a]);
                out
            }
        }
    }
}
