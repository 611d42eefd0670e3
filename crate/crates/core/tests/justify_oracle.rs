use std::collections::BTreeSet;

use omplan::dl::{Axiom, Concept};
use omplan::justify::{brute_force_explanations, single_just, Algorithm, FluentSet, JustifyConfig, Justifier};
use omplan::reasoner::Reasoner;
use omplan_testkit::gen::justify_instance;
use omplan_testkit::oracle::minimal_inconsistent_subsets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn routes_agree_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..150 {
        let inst = justify_instance(&mut rng);
        let r = Reasoner::default();
        let expected = brute_force_explanations(&inst.static_axioms, &inst.fluents, &inst.queries, &r).unwrap();
        assert!(expected.is_antichain());
        for alg in Algorithm::ALL {
            let mut j = Justifier::new(&r, JustifyConfig::default());
            let got = j.explain(&inst.static_axioms, &inst.fluents, &inst.queries, alg).unwrap();
            assert_eq!(got, expected, "instance {i}, {alg}: {inst:#?}");
        }
    }
}

#[test]
fn pruning_flags_do_not_change_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        let inst = justify_instance(&mut rng);
        let r = Reasoner::default();
        let mut base = Justifier::new(&r, JustifyConfig::default());
        let want = base.explain(&inst.static_axioms, &inst.fluents, &inst.queries, Algorithm::Concept).unwrap();
        for (fig4, path) in [(false, true), (true, false), (false, false)] {
            let cfg = JustifyConfig { figure4_pruning: fig4, path_pruning: path, concurrent: false };
            let mut j = Justifier::new(&r, cfg);
            assert_eq!(j.explain(&inst.static_axioms, &inst.fluents, &inst.queries, Algorithm::Concept).unwrap(), want);
        }
    }
}

#[test]
fn concurrent_mode_is_set_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..60 {
        let inst = justify_instance(&mut rng);
        let r = Reasoner::default();
        for alg in Algorithm::ALL {
            let mut seq = Justifier::new(&r, JustifyConfig::default());
            let mut par = Justifier::new(&r, JustifyConfig { concurrent: true, ..JustifyConfig::default() });
            let a = seq.explain(&inst.static_axioms, &inst.fluents, &inst.queries, alg).unwrap();
            let b = par.explain(&inst.static_axioms, &inst.fluents, &inst.queries, alg).unwrap();
            assert_eq!(a, b);
        }
    }
}

/// Minimal F ⊆ f with o_s ∪ F ⊨ α, enumerated directly.
fn entailment_sets(o_s: &[Axiom], f: &[Axiom], alpha: &Axiom, r: &Reasoner) -> BTreeSet<FluentSet> {
    let n = f.len();
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut hits: Vec<u32> = Vec::new();
    for m in masks {
        if hits.iter().any(|h| h & m == *h) {
            continue;
        }
        let sub: Vec<&Axiom> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| &f[i]).collect();
        if r.entails(o_s.iter().chain(sub.iter().copied()), alpha).unwrap() {
            hits.push(m);
        }
    }
    hits.iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| f[i].clone()).collect()).collect()
}

#[test]
fn query_sets_match_direct_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let r = Reasoner::default();
    for _ in 0..80 {
        let inst = justify_instance(&mut rng);
        let alpha = &inst.queries[rng.gen_range(0..inst.queries.len())];
        let direct = entailment_sets(&inst.static_axioms, &inst.fluents, alpha, &r);
        let mut j = Justifier::new(&r, JustifyConfig::default());
        let via = j.explain_query_basic(&inst.static_axioms, &inst.fluents, alpha).unwrap();
        assert_eq!(direct, via);
    }
}

#[test]
fn marker_sets_match_query_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let r = Reasoner::default();
    let mut checked = 0;
    for _ in 0..120 {
        let inst = justify_instance(&mut rng);
        let Axiom::ClassAssertion(c, _) = &inst.queries[0] else { unreachable!() };
        let marker = Concept::name("FreshMarker");
        let mut o_prime: Vec<Axiom> = inst.static_axioms.clone();
        o_prime.extend(inst.fluents.iter().cloned());
        o_prime.push(Axiom::sub(Concept::and([c.clone(), marker.clone()]), Concept::Bottom));
        let q_prime: Vec<Axiom> = inst
            .queries
            .iter()
            .map(|q| match q {
                Axiom::ClassAssertion(_, a) => Axiom::class(marker.clone(), a.clone()),
                _ => unreachable!(),
            })
            .collect();
        o_prime.extend(q_prime.iter().cloned());
        if o_prime.len() > 12 {
            continue;
        }
        checked += 1;
        let mis = minimal_inconsistent_subsets(&o_prime, |s| r.is_consistent(s).unwrap());
        let mut via: BTreeSet<(Axiom, FluentSet)> = BTreeSet::new();
        for m in &mis {
            let j: Vec<&Axiom> = m.iter().map(|&i| &o_prime[i]).collect();
            let fs: FluentSet = j.iter().filter(|a| inst.fluents.contains(a)).map(|a| (*a).clone()).collect();
            let own: Vec<usize> = (0..q_prime.len()).filter(|k| j.contains(&&q_prime[*k])).collect();
            if own.is_empty() {
                for q in &inst.queries {
                    via.insert((q.clone(), fs.clone()));
                }
            } else if own.len() == 1 {
                via.insert((inst.queries[own[0]].clone(), fs));
            }
        }
        let mut direct: BTreeSet<(Axiom, FluentSet)> = BTreeSet::new();
        for q in &inst.queries {
            for fs in entailment_sets(&inst.static_axioms, &inst.fluents, q, &r) {
                direct.insert((q.clone(), fs));
            }
        }
        let minimal: BTreeSet<(Axiom, FluentSet)> = via
            .iter()
            .filter(|(q, s)| !via.iter().any(|(q2, s2)| q2 == q && s2 != s && s2.is_subset(s)))
            .cloned()
            .collect();
        assert_eq!(direct, minimal);
    }
    assert!(checked >= 20, "only {checked} instances small enough");
}

#[test]
fn single_just_is_minimal_and_inconsistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let r = Reasoner::default();
    let mut checked = 0;
    for _ in 0..200 {
        let inst = justify_instance(&mut rng);
        let mut all: Vec<Axiom> = inst.static_axioms.clone();
        all.extend(inst.fluents.iter().cloned());
        all.truncate(10);
        if r.is_consistent(&all).unwrap() {
            continue;
        }
        checked += 1;
        let j = single_just(&all, &r).unwrap();
        assert!(!r.is_consistent(&j).unwrap());
        for k in 0..j.len() {
            let rest: Vec<&Axiom> = j.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, a)| a).collect();
            assert!(r.is_consistent(rest).unwrap());
        }
        let mis = minimal_inconsistent_subsets(&all, |s| r.is_consistent(s).unwrap());
        let idx: Vec<usize> = j.iter().map(|a| all.iter().position(|b| b == a).unwrap()).collect();
        assert!(mis.contains(&idx));
    }
    assert!(checked > 10);
}

#[test]
fn call_counts_dominate_on_interchangeable_individuals() {
    for k in 2..=6 {
        let inds: Vec<String> = (0..k).map(|i| format!("i{i}")).collect();
        let o_s = vec![Axiom::sub(Concept::and([Concept::name("A"), Concept::name("B")]), Concept::name("C"))];
        let mut f = Vec::new();
        for a in &inds {
            f.push(Axiom::class(Concept::name("A"), a.clone()));
            f.push(Axiom::class(Concept::name("B"), a.clone()));
        }
        let q: Vec<Axiom> = inds.iter().map(|a| Axiom::class(Concept::name("C"), a.clone())).collect();
        let mut calls = Vec::new();
        for alg in Algorithm::ALL {
            let r = Reasoner::default();
            let mut j = Justifier::new(&r, JustifyConfig::default());
            j.explain(&o_s, &f, &q, alg).unwrap();
            calls.push(j.stats());
        }
        println!("k={k}: {:?}", calls.iter().map(|c| (c.consistency_calls, c.single_just_calls)).collect::<Vec<_>>());
        assert!(calls[2].consistency_calls <= calls[1].consistency_calls, "k={k}: {calls:?}");
        assert!(calls[1].consistency_calls <= calls[0].consistency_calls, "k={k}: {calls:?}");
        assert!(calls[2].single_just_calls < calls[1].single_just_calls);
    }
}
