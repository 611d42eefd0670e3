//! Seeded random instance generators.

use omplan::dl::{Axiom, Concept};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct Vocab {
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub individuals: Vec<String>,
}

impl Vocab {
    pub fn small(concepts: usize, roles: usize, individuals: usize) -> Vocab {
        let names = |prefix: &[&str], n: usize| prefix.iter().take(n).map(|s| s.to_string()).collect();
        Vocab {
            concepts: names(&["A", "B", "C", "D", "E"], concepts),
            roles: names(&["r", "s", "t"], roles),
            individuals: names(&["a", "b", "c", "d"], individuals),
        }
    }

    fn concept_name<R: Rng>(&self, rng: &mut R) -> Concept {
        Concept::name(self.concepts.choose(rng).unwrap().clone())
    }

    fn role<R: Rng>(&self, rng: &mut R) -> String {
        self.roles.choose(rng).unwrap().clone()
    }

    fn individual<R: Rng>(&self, rng: &mut R) -> String {
        self.individuals.choose(rng).unwrap().clone()
    }
}

/// Unrestricted random concept of bounded depth.
pub fn concept<R: Rng>(rng: &mut R, v: &Vocab, depth: usize, max_card: u32) -> Concept {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            2 | 3 => Concept::not(v.concept_name(rng)),
            _ => v.concept_name(rng),
        };
    }
    let sub = |rng: &mut R| concept(rng, v, depth - 1, max_card);
    match rng.gen_range(0..8) {
        0 => Concept::not(sub(rng)),
        1 => Concept::and([sub(rng), sub(rng)]),
        2 => Concept::or([sub(rng), sub(rng)]),
        3 => Concept::exists(v.role(rng), sub(rng)),
        4 => Concept::forall(v.role(rng), sub(rng)),
        5 => Concept::at_least(rng.gen_range(0..=max_card), v.role(rng), sub(rng)),
        6 => Concept::at_most(rng.gen_range(0..=max_card), v.role(rng), sub(rng)),
        _ => Concept::and([sub(rng), Concept::not(sub(rng))]),
    }
}

/// No role restrictions at all.
pub fn is_boolean(c: &Concept) -> bool {
    match c {
        Concept::Top | Concept::Bottom | Concept::Name(_) => true,
        Concept::Not(x) => is_boolean(x),
        Concept::And(xs) | Concept::Or(xs) => xs.iter().all(is_boolean),
        _ => false,
    }
}

/// An NNF concept that never forces a new domain element.
fn demand_free(c: &Concept) -> bool {
    match c {
        Concept::Top | Concept::Bottom | Concept::Name(_) | Concept::Not(_) => true,
        Concept::And(xs) | Concept::Or(xs) => xs.iter().all(demand_free),
        Concept::Exists(..) => false,
        Concept::AtLeast(n, _, _) => *n == 0,
        Concept::Forall(_, x) => demand_free(x),
        Concept::AtMost(_, _, x) => is_boolean(x),
    }
}

/// Upper bound on the anonymous elements an NNF assertion can require, if
/// the concept keeps all witnesses one step from the asserted individual.
fn witness_demand(c: &Concept) -> Option<u32> {
    match c {
        Concept::Top | Concept::Bottom | Concept::Name(_) | Concept::Not(_) => Some(0),
        Concept::And(xs) | Concept::Or(xs) => xs.iter().map(witness_demand).sum(),
        Concept::Exists(_, x) => is_boolean(x).then_some(1),
        Concept::AtLeast(n, _, x) => is_boolean(x).then_some(*n),
        Concept::Forall(_, x) => demand_free(x).then_some(0),
        Concept::AtMost(_, _, x) => is_boolean(x).then_some(0),
    }
}

fn gci_ok(c: &Concept, d: &Concept) -> bool {
    demand_free(&Concept::or([Concept::not(c.clone()), d.clone()]).nnf())
}

/// Random ontology whose consistency is decided by models of size ≤ `bound`.
///
/// TBox axioms never force new elements and every assertion needs at most a
/// layer of witnesses whose total fits, together with the individuals, in
/// `bound` elements.
pub fn bounded_ontology<R: Rng>(rng: &mut R, v: &Vocab, bound: usize, max_card: u32) -> Vec<Axiom> {
    let mut budget = bound.saturating_sub(v.individuals.len()) as u32;
    let mut out = Vec::new();
    let tbox = rng.gen_range(0..=3);
    for _ in 0..tbox {
        for _ in 0..50 {
            let c = concept(rng, v, 2, max_card);
            let d = concept(rng, v, 2, max_card);
            if rng.gen_bool(0.15) {
                if gci_ok(&c, &d) && gci_ok(&d, &c) {
                    out.push(Axiom::EquivalentClasses(c, d));
                    break;
                }
            } else if gci_ok(&c, &d) {
                out.push(Axiom::sub(c, d));
                break;
            }
        }
    }
    let abox = rng.gen_range(1..=5);
    for _ in 0..abox {
        let ax = match rng.gen_range(0..10) {
            0..=4 => {
                let mut pick = None;
                for _ in 0..50 {
                    let c = concept(rng, v, 3, max_card);
                    if let Some(w) = witness_demand(&c.nnf()) {
                        if w <= budget {
                            budget -= w;
                            pick = Some(c);
                            break;
                        }
                    }
                }
                Axiom::class(pick.unwrap_or_else(|| v.concept_name(rng)), v.individual(rng))
            }
            5 | 6 => Axiom::role(v.role(rng), v.individual(rng), v.individual(rng)),
            7 => Axiom::neg_role(v.role(rng), v.individual(rng), v.individual(rng)),
            8 => Axiom::same(v.individual(rng), v.individual(rng)),
            _ => Axiom::different(v.individual(rng), v.individual(rng)),
        };
        out.push(ax);
    }
    out.dedup();
    let mut seen = Vec::new();
    out.retain(|a| {
        if seen.contains(a) {
            false
        } else {
            seen.push(a.clone());
            true
        }
    });
    out
}

/// Static ontology, fluent set and query batch for justification tests.
#[derive(Clone, Debug)]
pub struct JustifyInstance {
    pub static_axioms: Vec<Axiom>,
    pub fluents: Vec<Axiom>,
    pub queries: Vec<Axiom>,
}

fn template_gci<R: Rng>(rng: &mut R, v: &Vocab) -> Axiom {
    let a = v.concept_name(rng);
    let b = v.concept_name(rng);
    let c = v.concept_name(rng);
    let r = v.role(rng);
    match rng.gen_range(0..9) {
        0 | 1 => Axiom::sub(Concept::and([a, b]), c),
        2 => Axiom::sub(a, Concept::not(b)),
        3 => Axiom::sub(a, b),
        4 => Axiom::sub(Concept::exists(r, a), b),
        5 => Axiom::sub(a, Concept::forall(r, b)),
        6 => Axiom::sub(a, Concept::at_most(1, r, b)),
        7 => Axiom::sub(Concept::and([a, Concept::at_least(2, r, b)]), c),
        _ => Axiom::sub(a, Concept::or([b, c])),
    }
}

fn fluent<R: Rng>(rng: &mut R, v: &Vocab) -> Axiom {
    match rng.gen_range(0..10) {
        0..=5 => Axiom::class(v.concept_name(rng), v.individual(rng)),
        6 => Axiom::class(Concept::not(v.concept_name(rng)), v.individual(rng)),
        7 | 8 => Axiom::role(v.role(rng), v.individual(rng), v.individual(rng)),
        _ => {
            let a = v.individual(rng);
            let mut b = v.individual(rng);
            if a == b {
                b = v.individuals.iter().find(|x| **x != a).cloned().unwrap_or(b);
            }
            Axiom::different(a, b)
        }
    }
}

/// Random instance with ≤ 6 TBox axioms, ≤ 8 fluents and ≤ 3 individuals.
/// Queries are class assertions of one concept name over all individuals.
pub fn justify_instance<R: Rng>(rng: &mut R) -> JustifyInstance {
    let v = Vocab::small(rng.gen_range(2..=4), rng.gen_range(1..=2), rng.gen_range(1..=3));
    let mut static_axioms = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let ax = if rng.gen_bool(0.2) {
            let c = concept(rng, &v, 2, 2);
            let d = concept(rng, &v, 2, 2);
            Axiom::sub(c, d)
        } else {
            template_gci(rng, &v)
        };
        if !static_axioms.contains(&ax) {
            static_axioms.push(ax);
        }
    }
    let mut fluents = Vec::new();
    for _ in 0..rng.gen_range(0..=8) {
        let ax = fluent(rng, &v);
        if !fluents.contains(&ax) {
            fluents.push(ax);
        }
    }
    let q = v.concept_name(rng);
    let queries = v.individuals.iter().map(|a| Axiom::class(q.clone(), a.clone())).collect();
    JustifyInstance { static_axioms, fluents, queries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_seeded() {
        let v = Vocab::small(3, 2, 3);
        let a = bounded_ontology(&mut ChaCha8Rng::seed_from_u64(7), &v, 4, 2);
        let b = bounded_ontology(&mut ChaCha8Rng::seed_from_u64(7), &v, 4, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn demand_classification() {
        let c = Concept::at_least(2, "r", Concept::name("A"));
        assert_eq!(witness_demand(&c), Some(2));
        let nested = Concept::exists("r", Concept::exists("r", Concept::Top));
        assert_eq!(witness_demand(&nested), None);
        assert!(!gci_ok(&Concept::name("A"), &Concept::exists("r", Concept::Top)));
        assert!(gci_ok(&Concept::exists("r", Concept::Top), &Concept::name("A")));
    }

    #[test]
    fn justify_instances_within_guards() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let inst = justify_instance(&mut rng);
            assert!(inst.static_axioms.len() <= 6);
            assert!(inst.fluents.len() <= 8);
            assert!(inst.queries.len() <= 3);
        }
    }
}
