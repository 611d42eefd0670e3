//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero on any failure.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use omplan::dl::{Axiom, Concept};
use omplan::justify::{brute_force_explanations, Algorithm, ExplanationTable, JustifyConfig, Justifier};
use omplan::omps::{Manifest, Omps, Semantics};
use omplan::pddl::{parse_plan, print_domain, print_problem, GroundAtom};
use omplan::planner::{format_plan, replay, solve, PlannerConfig};
use omplan::reasoner::Reasoner;
use omplan::rewrite::{rew, RewriteConfig};
use omplan_cli::commands::{table_csv, tables};
use omplan_cli::gen::blocksworld;
use omplan_cli::RunConfig;
use omplan_testkit::gen::{bounded_ontology, justify_instance, Vocab};
use omplan_testkit::oracle::has_model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn load(bundle: &str) -> Omps {
    Manifest::read(fixture(bundle)).unwrap().load().unwrap()
}

fn cls(c: &str, a: &str) -> Axiom {
    Axiom::class(Concept::name(c), a)
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn twins_exactness() -> Outcome {
    let start = Instant::now();
    let o_s = vec![Axiom::sub(Concept::and([Concept::name("A"), Concept::name("B")]), Concept::name("C"))];
    let f = vec![cls("A", "a"), cls("B", "a"), cls("A", "b"), cls("B", "b")];
    let q = vec![cls("C", "a"), cls("C", "b")];
    let mut want = ExplanationTable::new();
    want.add_row(cls("C", "a"), [cls("A", "a"), cls("B", "a")].into_iter().collect());
    want.add_row(cls("C", "b"), [cls("A", "b"), cls("B", "b")].into_iter().collect());
    let r = Reasoner::default();
    let mut nodes = Vec::new();
    for fig4 in [true, false] {
        let cfg = JustifyConfig { figure4_pruning: fig4, ..JustifyConfig::default() };
        let mut j = Justifier::new(&r, cfg);
        let got = j.explain(&o_s, &f, &q, Algorithm::Concept).map_err(|e| e.to_string())?;
        check(got == want, format!("rows {got:?}"))?;
        nodes.push(j.stats().hst_nodes);
    }
    check(nodes == [7, 13], format!("hst nodes {nodes:?}, expected [7, 13]"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("2 rows, hst nodes {} / {}", nodes[0], nodes[1]))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let r = Reasoner::default();
    let n = 500;
    for i in 0..n {
        let inst = justify_instance(&mut rng);
        let expected = brute_force_explanations(&inst.static_axioms, &inst.fluents, &inst.queries, &r).map_err(|e| e.to_string())?;
        for alg in Algorithm::ALL {
            
            let mut j = Justifier::new(&r, JustifyConfig::default());
            let got = j.explain(&inst.static_axioms, &inst.fluents, &inst.queries, alg).map_err(|e| e.to_string())?;
            check(got == expected, format!("instance {i} differs under {alg}"))?;
        }
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!("{n} instances, 3 algorithms, {:.1?}", start.elapsed()))
}

fn holds(b: &str) -> GroundAtom {
    GroundAtom::new("holds", ["stackBot", b])
}

fn blocksworld_rewriting() -> Outcome {
    let start = Instant::now();
    let omps = load("blocksworld/bundle.omps");
    let rw = rew(&omps, &Reasoner::default(), &RewriteConfig::default()).map_err(|e| e.to_string())?;
    let fh = rw.rule_for(&GroundAtom::new("fullHands", ["stackBot"])).ok_or("no fullHands rule")?;
    let pair = |a: &str, b: &str| [holds(a), holds(b)].into_iter().collect::<BTreeSet<_>>();
    let want: BTreeSet<_> =
        [pair("blockA", "blockB"), pair("blockA", "blockC"), pair("blockB", "blockC")].into_iter().collect();
    check(fh.body == want, format!("fullHands body {:?}", fh.body))?;
    let inc = rw.inc_predicate.as_deref().ok_or("no inc rule")?;
    let inc_rule = rw.rule_for(&GroundAtom::new(inc, Vec::<String>::new())).ok_or("inc rule missing")?;
    let triple: BTreeSet<GroundAtom> = [holds("blockA"), holds("blockB"), holds("blockC")].into_iter().collect();
    check(inc_rule.body == [triple].into_iter().collect(), format!("inc body {:?}", inc_rule.body))?;
    within(start, Duration::from_secs(5))?;
    Ok("fullHands: 3 disjuncts; inc: the three-block triple".into())
}

fn plan_correspondence() -> Outcome {
    let start = Instant::now();
    let r = Reasoner::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e01);
    let (mut plans, mut unsolvable) = (0, 0);
    for i in 0..50 {
        let n = 3 + i % 3;
        let bundle = blocksworld(&mut rng, n, &format!("bw{i}"));
        let omps = bundle.load().map_err(|e| e.to_string())?;
        let rw = rew(&omps, &r, &RewriteConfig::default()).map_err(|e| e.to_string())?;
        let res = solve(&rw.spec, &PlannerConfig::default()).map_err(|e| e.to_string())?;
        match res.outcome.plan() {
            Some(p) => {
                let v = Semantics::new(&omps, &r).and_then(|s| s.validate_plan(p)).map_err(|e| e.to_string())?;
                check(v.is_accept(), format!("instance {i}: plan rejected: {v}\n{}", format_plan(p)))?;
                plans += 1;
            }
            None => unsolvable += 1,
        }
    }
    check(plans > 0, "no plans found")?;
    for (bundle, file) in [("blocksworld/bundle.omps", "blocksworld/plan.txt"), ("blocksworld/bundle-hands.omps", "blocksworld/plan-hands.txt")] {
        let omps = load(bundle);
        let rw = rew(&omps, &r, &RewriteConfig::default()).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(fixture(file)).map_err(|e| e.to_string())?;
        let plan = parse_plan(&text, &rw.spec).map_err(|e| e.to_string())?;
        let v = replay(&rw.spec, &plan).map_err(|e| e.to_string())?;
        check(v.is_accept(), format!("{file} does not replay: {v}"))?;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{plans} plans validated, {unsolvable} unsolvable goals, 2 reference plans replayed"))
}

fn reasoner_soundness() -> Outcome {
    let r = Reasoner::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x50d);
    let n = 1000;
    for i in 0..n {
        let v = Vocab::small(rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(1..=3));
        let o = bounded_ontology(&mut rng, &v, 4, 2);
        let t = r.is_consistent(&o).map_err(|e| e.to_string())?;
        check(t == has_model(&o, 4), format!("instance {i} disagrees with the model oracle"))?;
    }
    let omps = load("blocksworld/bundle.omps");
    let with = |blocks: &[&str]| -> Vec<Axiom> {
        omps.static_ontology
            .iter()
            .cloned()
            .chain(blocks.iter().map(|b| Axiom::role("holds", "stackBot", *b)))
            .collect()
    };
    let three = with(&["blockA", "blockB", "blockC"]);
    check(!r.is_consistent(&three).map_err(|e| e.to_string())?, "three holds are consistent")?;
    let two = with(&["blockA", "blockB"]);
    let fh = cls("FullHands", "stackBot");
    check(r.entails(&two, &fh).map_err(|e| e.to_string())?, "two holds do not entail FullHands")?;
    Ok(format!("{n} instances agree; three holds inconsistent; two holds entail FullHands(stackBot)"))
}

fn optimization_effect() -> Outcome {
    let mut lines = Vec::new();
    for k in 2..=6usize {
        let inds: Vec<String> = (0..k).map(|i| format!("i{i}")).collect();
        let o_s = vec![Axiom::sub(Concept::and([Concept::name("A"), Concept::name("B")]), Concept::name("C"))];
        let f: Vec<Axiom> = inds.iter().flat_map(|a| [cls("A", a), cls("B", a)]).collect();
        let q: Vec<Axiom> = inds.iter().map(|a| cls("C", a)).collect();
        let r = Reasoner::default();
        let mut s = Vec::new();
        for alg in Algorithm::ALL {
            let mut j = Justifier::new(&r, JustifyConfig::default());
            j.explain(&o_s, &f, &q, alg).map_err(|e| e.to_string())?;
            s.push(j.stats());
        }
        let (b, c, sc) = (s[0], s[1], s[2]);
        check(
            sc.consistency_calls <= c.consistency_calls && c.consistency_calls <= b.consistency_calls,
            format!("k={k}: consistency calls schema {} concept {} basic {}", sc.consistency_calls, c.consistency_calls, b.consistency_calls),
        )?;
        if k >= 3 {
            check(
                sc.single_just_calls < c.single_just_calls,
                format!("k={k}: single-just calls schema {} concept {}", sc.single_just_calls, c.single_just_calls),
            )?;
        }
        lines.push(format!("k={k} {}/{}/{}", sc.consistency_calls, c.consistency_calls, b.consistency_calls));
    }
    Ok(format!("schema/concept/basic calls: {}", lines.join(", ")))
}

fn determinism() -> Outcome {
    let omps = load("blocksworld/bundle.omps");
    let run = RunConfig::default();
    let compile = || -> Result<String, String> {
        let rw = rew(&omps, &run.reasoner(), &run.rewrite()).map_err(|e| e.to_string())?;
        Ok(format!("{}{}{}", print_domain(&rw.spec.domain), print_problem(&rw.spec.problem), rw.provenance_json()))
    };
    check(compile()? == compile()?, "compile output differs")?;
    let justify = |run: &RunConfig| -> Result<(String, ExplanationTable), String> {
        let (t, _) = tables(&omps, run).map_err(|e| e.to_string())?;
        Ok((table_csv(&t).map_err(|e| e.to_string())?, t.table))
    };
    let (csv1, t1) = justify(&run)?;
    let (csv2, _) = justify(&run)?;
    check(csv1 == csv2, "justify output differs")?;
    let plan = || -> Result<String, String> {
        let rw = rew(&omps, &run.reasoner(), &run.rewrite()).map_err(|e| e.to_string())?;
        let res = solve(&rw.spec, &run.planner()).map_err(|e| e.to_string())?;
        Ok(format_plan(res.outcome.plan().ok_or("no plan")?))
    };
    check(plan()? == plan()?, "plan output differs")?;
    for alg in Algorithm::ALL {
        let seq = RunConfig { algorithm: alg, ..RunConfig::default() };
        let par = RunConfig { algorithm: alg, concurrent: true, ..RunConfig::default() };
        let (_, a) = justify(&seq)?;
        let (_, b) = justify(&par)?;
        check(a == b, format!("concurrent {alg} table differs"))?;
    }
    let twins = load("twins/bundle.omps");
    let sets = |concurrent: bool| -> Result<ExplanationTable, String> {
        let cfg = RunConfig { algorithm: Algorithm::Concept, concurrent, ..RunConfig::default() };
        Ok(tables(&twins, &cfg).map_err(|e| e.to_string())?.0.table)
    };
    check(sets(false)? == sets(true)?, "concurrent example table differs")?;
    check(!t1.is_empty(), "empty blocksworld table")?;
    Ok("compile, justify and plan byte-identical; concurrent tables set-identical".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 shared-rule exactness", twins_exactness),
        ("2 oracle equivalence", oracle_equivalence),
        ("3 blocksworld rewriting", blocksworld_rewriting),
        ("4 plan correspondence", plan_correspondence),
        ("5 reasoner soundness", reasoner_soundness),
        ("6 optimization effect", optimization_effect),
        ("7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
