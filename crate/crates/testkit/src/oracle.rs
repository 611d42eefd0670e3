//! Finite model enumeration over small domains.
//!
//! Independent of the tableau: axioms are checked directly against partial
//! interpretations with three-valued evaluation and chronological backtracking.

use std::collections::HashMap;

use omplan::dl::{Axiom, Concept};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tri {
    T,
    F,
    U,
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::T => Tri::F,
            Tri::F => Tri::T,
            Tri::U => Tri::U,
        }
    }
}

struct Interp {
    n: usize,
    concepts: HashMap<String, usize>,
    roles: HashMap<String, usize>,
    cval: Vec<Option<bool>>,
    rval: Vec<Option<bool>>,
}

impl Interp {
    fn c(&self, name: &str, d: usize) -> Option<bool> {
        self.cval[self.concepts[name] * self.n + d]
    }

    fn r(&self, role: &str, d: usize, e: usize) -> Option<bool> {
        self.rval[(self.roles[role] * self.n + d) * self.n + e]
    }

    fn eval(&self, c: &Concept, d: usize) -> Tri {
        match c {
            Concept::Top => Tri::T,
            Concept::Bottom => Tri::F,
            Concept::Name(a) => match self.c(a, d) {
                Some(true) => Tri::T,
                Some(false) => Tri::F,
                None => Tri::U,
            },
            Concept::Not(x) => self.eval(x, d).not(),
            Concept::And(xs) => {
                let mut out = Tri::T;
                for x in xs {
                    match self.eval(x, d) {
                        Tri::F => return Tri::F,
                        Tri::U => out = Tri::U,
                        Tri::T => {}
                    }
                }
                out
            }
            Concept::Or(xs) => {
                let mut out = Tri::F;
                for x in xs {
                    match self.eval(x, d) {
                        Tri::T => return Tri::T,
                        Tri::U => out = Tri::U,
                        Tri::F => {}
                    }
                }
                out
            }
            Concept::Exists(r, x) => self.count(r, x, d, 1, true),
            Concept::AtLeast(n, r, x) => self.count(r, x, d, *n, true),
            Concept::AtMost(n, r, x) => self.count(r, x, d, *n, false),
            Concept::Forall(r, x) => {
                let mut out = Tri::T;
                for e in 0..self.n {
                    let edge = self.r(r, d, e);
                    if edge == Some(false) {
                        continue;
                    }
                    match (edge, self.eval(x, e)) {
                        (_, Tri::T) => {}
                        (Some(true), Tri::F) => return Tri::F,
                        _ => out = Tri::U,
                    }
                }
                out
            }
        }
    }

    /// `at_least`: #{e | r(d,e) ∧ x(e)} ≥ n, otherwise ≤ n.
    fn count(&self, r: &str, x: &Concept, d: usize, n: u32, at_least: bool) -> Tri {
        let mut sure = 0u32;
        let mut possible = 0u32;
        for e in 0..self.n {
            let edge = self.r(r, d, e);
            if edge == Some(false) {
                continue;
            }
            match self.eval(x, e) {
                Tri::F => {}
                Tri::T if edge == Some(true) => {
                    sure += 1;
                    possible += 1;
                }
                _ => possible += 1,
            }
        }
        if at_least {
            if sure >= n {
                Tri::T
            } else if possible < n {
                Tri::F
            } else {
                Tri::U
            }
        } else if possible <= n {
            Tri::T
        } else if sure > n {
            Tri::F
        } else {
            Tri::U
        }
    }
}

enum Constraint {
    At(Concept, usize),
    Everywhere(Concept),
}

/// Whether `axioms` have a model with at most `bound` domain elements.
///
/// Individuals may share elements (no unique name assumption).
pub fn has_model(axioms: &[Axiom], bound: usize) -> bool {
    let mut concepts: HashMap<String, usize> = HashMap::new();
    let mut roles: HashMap<String, usize> = HashMap::new();
    let mut inds: Vec<String> = Vec::new();
    for ax in axioms {
        ax.visit_names(
            &mut |c| {
                let k = concepts.len();
                concepts.entry(c.to_string()).or_insert(k);
            },
            &mut |r| {
                let k = roles.len();
                roles.entry(r.to_string()).or_insert(k);
            },
        );
        for a in ax.individuals() {
            if !inds.iter().any(|x| x == a) {
                inds.push(a.to_string());
            }
        }
    }
    for n in 1..=bound.max(1) {
        let mut map = vec![0usize; inds.len()];
        if mappings(&mut map, 0, 0, n, &mut |m| try_mapping(axioms, &concepts, &roles, &inds, m, n)) {
            return true;
        }
    }
    false
}

/// Restricted-growth enumeration of individual → element maps.
fn mappings(map: &mut Vec<usize>, i: usize, used: usize, n: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if i == map.len() {
        return f(map);
    }
    for e in 0..(used + 1).min(n) {
        map[i] = e;
        if mappings(map, i + 1, used.max(e + 1), n, f) {
            return true;
        }
    }
    false
}

fn try_mapping(
    axioms: &[Axiom],
    concepts: &HashMap<String, usize>,
    roles: &HashMap<String, usize>,
    inds: &[String],
    map: &[usize],
    n: usize,
) -> bool {
    let el = |a: &str| map[inds.iter().position(|x| x == a).unwrap()];
    let mut it = Interp {
        n,
        concepts: concepts.clone(),
        roles: roles.clone(),
        cval: vec![None; concepts.len() * n],
        rval: vec![None; roles.len() * n * n],
    };
    let mut cons = Vec::new();
    for ax in axioms {
        match ax {
            Axiom::SubClassOf(c, d) => cons.push(Constraint::Everywhere(Concept::or([Concept::not(c.clone()), d.clone()]))),
            Axiom::EquivalentClasses(c, d) => {
                cons.push(Constraint::Everywhere(Concept::or([Concept::not(c.clone()), d.clone()])));
                cons.push(Constraint::Everywhere(Concept::or([Concept::not(d.clone()), c.clone()])));
            }
            Axiom::ClassAssertion(c, a) => cons.push(Constraint::At(c.clone(), el(a))),
            Axiom::RoleAssertion(r, a, b) | Axiom::NegativeRoleAssertion(r, a, b) => {
                let want = matches!(ax, Axiom::RoleAssertion(..));
                let idx = (roles[r.as_str()] * n + el(a)) * n + el(b);
                match it.rval[idx] {
                    Some(v) if v != want => return false,
                    _ => it.rval[idx] = Some(want),
                }
            }
            Axiom::SameIndividual(a, b) => {
                if el(a) != el(b) {
                    return false;
                }
            }
            Axiom::DifferentIndividuals(a, b) => {
                if el(a) == el(b) {
                    return false;
                }
            }
        }
    }
    // Concept values first: refutations rarely need a full role assignment.
    let mut vars: Vec<(bool, usize)> = Vec::new();
    for d in 0..n {
        for c in 0..concepts.len() {
            vars.push((true, c * n + d));
        }
    }
    for d in 0..n {
        for r in 0..roles.len() {
            for e in 0..n {
                let idx = (r * n + d) * n + e;
                if it.rval[idx].is_none() {
                    vars.push((false, idx));
                }
            }
        }
    }
    search(&mut it, &cons, &vars, 0)
}

fn status(it: &Interp, cons: &[Constraint]) -> Tri {
    let mut out = Tri::T;
    for c in cons {
        let v = match c {
            Constraint::At(c, d) => it.eval(c, *d),
            Constraint::Everywhere(c) => {
                let mut v = Tri::T;
                for d in 0..it.n {
                    match it.eval(c, d) {
                        Tri::F => {
                            v = Tri::F;
                            break;
                        }
                        Tri::U => v = Tri::U,
                        Tri::T => {}
                    }
                }
                v
            }
        };
        match v {
            Tri::F => return Tri::F,
            Tri::U => out = Tri::U,
            Tri::T => {}
        }
    }
    out
}

fn search(it: &mut Interp, cons: &[Constraint], vars: &[(bool, usize)], i: usize) -> bool {
    match status(it, cons) {
        Tri::F => return false,
        Tri::T => return true,
        Tri::U => {}
    }
    if i == vars.len() {
        return false;
    }
    let (is_concept, idx) = vars[i];
    for v in [false, true] {
        if is_concept {
            it.cval[idx] = Some(v);
        } else {
            it.rval[idx] = Some(v);
        }
        if search(it, cons, vars, i + 1) {
            return true;
        }
    }
    if is_concept {
        it.cval[idx] = None;
    } else {
        it.rval[idx] = None;
    }
    false
}

/// All subset-minimal inconsistent subsets, by powerset enumeration in
/// order of increasing size.
pub fn minimal_inconsistent_subsets<T: Clone>(items: &[T], mut consistent: impl FnMut(&[T]) -> bool) -> Vec<Vec<usize>> {
    let n = items.len();
    assert!(n <= 20, "powerset oracle limited to 20 items");
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for m in masks {
        if found.iter().any(|f| f & m == *f) {
            continue;
        }
        let subset: Vec<T> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone()).collect();
        if !consistent(&subset) {
            found.push(m);
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
    out.sort();
    out
}
