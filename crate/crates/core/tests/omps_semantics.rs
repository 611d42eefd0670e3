use std::path::PathBuf;

use omplan::dl::{Axiom, Concept};
use omplan::omps::{candidates, Condition, Manifest, Omps, PlanFailure, PlanVerdict, Semantics, Verdict};
use omplan::pddl::{parse_plan, Formula, GroundAtom, State};
use omplan::reasoner::Reasoner;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(bundle: &str) -> Omps {
    Manifest::read(fixture(bundle)).unwrap().load().unwrap()
}

fn atom(p: &str, args: &[&str]) -> GroundAtom {
    GroundAtom::new(p, args.iter().copied())
}

fn fh() -> GroundAtom {
    atom("fullHands", &["stackBot"])
}

#[test]
fn fluents_cover_all_mapped_pairs() {
    let omps = load("blocksworld/bundle.omps");
    let fl = omps.fluents();
    assert_eq!(fl.len(), 16);
    assert!(fl.contains(&Axiom::role("holds", "stackBot", "blockA")));
    assert!(fl.contains(&Axiom::role("holds", "blockC", "blockC")));
}

#[test]
fn candidates_follow_static_types() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    assert_eq!(candidates(&omps.queries[0], &omps, &r).unwrap(), vec![vec!["stackBot".to_string()]]);
    let mut q = omps.queries[0].clone();
    q.types = vec![Concept::name("Block")];
    let blocks: Vec<Vec<String>> = ["blockA", "blockB", "blockC"].iter().map(|b| vec![b.to_string()]).collect();
    assert_eq!(candidates(&q, &omps, &r).unwrap(), blocks);
    q.types = vec![Concept::Top];
    assert_eq!(candidates(&q, &omps, &r).unwrap().len(), 4);
}

#[test]
fn two_held_blocks_force_full_hands() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    let s: State = [
        atom("holds", &["stackBot", "blockA"]),
        atom("holds", &["stackBot", "blockB"]),
        atom("on", &["blockB", "blockA"]),
        atom("onTable", &["blockC"]),
    ]
    .into_iter()
    .collect();
    let q = sem.ext(&s).unwrap();
    assert!(q.consistent);
    assert!(q.state.contains(&fh()));
    assert_eq!(q.ontology.len(), omps.static_ontology.len() + 2);
    assert!(q.ontology.contains(&Axiom::role("holds", "stackBot", "blockA")));
    assert!(q.ontology.contains(&Axiom::role("holds", "stackBot", "blockB")));
    assert!(sem.is_compatible(&q).unwrap().is_compatible());

    let one: State = [atom("holds", &["stackBot", "blockA"])].into_iter().collect();
    assert!(!sem.ext(&one).unwrap().state.contains(&fh()));
}

#[test]
fn empty_state_extends_to_static_ontology() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    let q = sem.ext(&State::new()).unwrap();
    assert_eq!(q.ontology, omps.static_ontology);
    assert!(q.state.is_empty());
}

#[test]
fn ext_rejects_query_atoms() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    let s: State = [fh()].into_iter().collect();
    assert!(sem.ext(&s).is_err());
}

#[test]
fn compatibility_violations_are_reported() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    let s: State = [atom("holds", &["stackBot", "blockA"]), atom("holds", &["stackBot", "blockB"])].into_iter().collect();
    let good = sem.ext(&s).unwrap();

    let mut missing_image = good.clone();
    missing_image.ontology = omps.static_ontology.clone();
    missing_image.ontology.insert(Axiom::role("holds", "stackBot", "blockA"));
    assert!(matches!(sem.is_compatible(&missing_image).unwrap(), Verdict::Violation { condition: Condition::C3, .. }));

    let mut missing_query = good.clone();
    missing_query.state.remove(&fh());
    assert!(matches!(sem.is_compatible(&missing_query).unwrap(), Verdict::Violation { condition: Condition::C5, .. }));

    let mut extra = good.clone();
    extra.ontology.insert(Axiom::class(Concept::name("Block"), "stackBot"));
    assert!(matches!(sem.is_compatible(&extra).unwrap(), Verdict::Violation { condition: Condition::C4, .. }));

    let mut no_static = good.clone();
    no_static.ontology = no_static.ontology.iter().filter(|a| a.is_abox()).cloned().collect();
    assert!(matches!(sem.is_compatible(&no_static).unwrap(), Verdict::Violation { condition: Condition::C2, .. }));

    let mut undeclared = good;
    undeclared.state.insert(atom("flying", &["stackBot"]));
    assert!(matches!(sem.is_compatible(&undeclared).unwrap(), Verdict::Violation { condition: Condition::C1, .. }));
}

fn plan(omps: &Omps, file: &str) -> Vec<omplan::pddl::GroundAction> {
    parse_plan(&std::fs::read_to_string(fixture(file)).unwrap(), &omps.spec).unwrap()
}

#[test]
fn reference_plans_validate() {
    let r = Reasoner::default();
    for (bundle, file) in [("blocksworld/bundle.omps", "blocksworld/plan.txt"), ("blocksworld/bundle-hands.omps", "blocksworld/plan-hands.txt")] {
        let omps = load(bundle);
        let sem = Semantics::new(&omps, &r).unwrap();
        assert_eq!(sem.validate_plan(&plan(&omps, file)).unwrap(), PlanVerdict::Accept, "{file}");
    }
}

#[test]
fn holding_three_blocks_is_rejected_at_consistency() {
    let omps = load("blocksworld/bundle-three.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    match sem.validate_plan(&plan(&omps, "blocksworld/plan-three.txt")).unwrap() {
        PlanVerdict::Reject { step, failure, .. } => {
            assert_eq!(step, 3);
            assert_eq!(failure, PlanFailure::Inconsistent);
        }
        v => panic!("unexpected verdict {v}"),
    }
}

#[test]
fn plan_failures_report_first_index() {
    let omps = load("blocksworld/bundle.omps");
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    let mut p = plan(&omps, "blocksworld/plan.txt");
    p.remove(1);
    assert!(matches!(
        sem.validate_plan(&p).unwrap(),
        PlanVerdict::Reject { step: 2, failure: PlanFailure::Inapplicable, .. }
    ));
    p.truncate(1);
    assert!(matches!(
        sem.validate_plan(&p).unwrap(),
        PlanVerdict::Reject { step: 1, failure: PlanFailure::GoalUnsatisfied, .. }
    ));
}

#[test]
fn empty_plan_with_satisfied_goal_accepts() {
    let mut omps = load("blocksworld/bundle.omps");
    omps.spec.problem.goal = Formula::atom(atom("onTable", &["blockA"]));
    let r = Reasoner::default();
    let sem = Semantics::new(&omps, &r).unwrap();
    assert!(sem.validate_plan(&[]).unwrap().is_accept());
}

const BLOCKS: [&str; 3] = ["blockA", "blockB", "blockC"];

fn arb_state() -> impl Strategy<Value = State> {
    (proptest::bits::u32::between(0, 3), proptest::bits::u32::between(0, 3), proptest::bits::u32::between(0, 9)).prop_map(
        |(held, table, on)| {
            let mut s = State::new();
            for (i, b) in BLOCKS.iter().enumerate() {
                if held >> i & 1 == 1 {
                    s.insert(atom("holds", &["stackBot", b]));
                }
                if table >> i & 1 == 1 {
                    s.insert(atom("onTable", &[b]));
                }
            }
            for (k, (x, y)) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)].into_iter().enumerate() {
                if on >> k & 1 == 1 {
                    s.insert(atom("on", &[BLOCKS[x], BLOCKS[y]]));
                }
            }
            s
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ext_is_compatible_and_idempotent(s in arb_state()) {
        let omps = load("blocksworld/bundle.omps");
        let r = Reasoner::default();
        let sem = Semantics::new(&omps, &r).unwrap();
        let q = sem.ext(&s).unwrap();
        prop_assert!(sem.is_compatible(&q).unwrap().is_compatible());
        let stripped = q.state.without_predicates(&omps.query_predicates());
        prop_assert_eq!(sem.ext(&stripped).unwrap(), q.clone());
        let held = s.iter().filter(|a| a.predicate == "holds").count();
        prop_assert_eq!(q.consistent, held <= 2);
        prop_assert_eq!(q.state.contains(&fh()), held >= 2);
    }
}
