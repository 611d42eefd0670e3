//! Grounding, closed-world evaluation, derived-predicate fixpoints and
//! action application.

use std::collections::{BTreeSet, HashMap};

use super::{Atom, DerivationRule, Formula, GroundAction, GroundAtom, PddlError, PddlSpec, State, Term};

/// Calls `f` on every assignment of `consts` to `k` positions, first position slowest.
fn for_each_tuple(consts: &[String], k: usize, mut f: impl FnMut(&[String])) {
    if k > 0 && consts.is_empty() {
        return;
    }
    let mut idx = vec![0usize; k];
    let mut tuple: Vec<String> = idx.iter().map(|&i| consts[i].clone()).collect();
    loop {
        f(&tuple);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < consts.len() {
                tuple[pos] = consts[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            tuple[pos] = consts[0].clone();
        }
    }
}

/// All instances of all action schemas, in schema order and then in
/// lexicographic order of the substitution over the constant order.
pub fn ground(spec: &PddlSpec) -> Vec<GroundAction> {
    let consts = spec.constants();
    let mut out = Vec::new();
    for schema in &spec.domain.actions {
        for_each_tuple(&consts, schema.params.len(), |t| out.push(GroundAction::instantiate(schema, t)));
    }
    out
}

/// Closed-world evaluation of a ground formula.
pub fn eval_formula(f: &Formula, view: &State) -> Result<bool, PddlError> {
    Ok(match f {
        Formula::Atom(a) => view.contains(&a.to_ground()?),
        Formula::Eq(a, b) => match (a, b) {
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Var(v), _) | (_, Term::Var(v)) => return Err(PddlError::UnboundVariable(v.clone())),
        },
        Formula::Not(g) => !eval_formula(g, view)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_formula(g, view)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_formula(g, view)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Imply(a, b) => !eval_formula(a, view)? || eval_formula(b, view)?,
        Formula::Exists(..) | Formula::Forall(..) => return Err(PddlError::Quantifier),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    pub head: GroundAtom,
    pub body: Formula,
}

/// Ground derivation rules with a dependency index for semi-naive evaluation.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    rules: Vec<GroundRule>,
    /// Ground derived atom → rules whose body mentions it.
    deps: HashMap<GroundAtom, Vec<usize>>,
    derived: BTreeSet<String>,
}

impl RuleSet {
    /// Instantiates the head variables of every rule over `constants`.
    pub fn new(rules: &[DerivationRule], constants: &[String]) -> RuleSet {
        let mut ground = Vec::new();
        for r in rules {
            let mut vars: Vec<&str> = Vec::new();
            for t in &r.head.args {
                if let Term::Var(v) = t {
                    if !vars.contains(&v.as_str()) {
                        vars.push(v);
                    }
                }
            }
            for_each_tuple(constants, vars.len(), |t| {
                let sigma: HashMap<&str, &str> = vars.iter().copied().zip(t.iter().map(String::as_str)).collect();
                let head = r.head.substitute(&sigma).to_ground().expect("head variables are bound");
                ground.push(GroundRule { head, body: r.body.substitute(&sigma) });
            });
        }
        RuleSet::from_ground(ground)
    }

    pub fn from_ground(rules: Vec<GroundRule>) -> RuleSet {
        let derived: BTreeSet<String> = rules.iter().map(|r| r.head.predicate.clone()).collect();
        let mut deps: HashMap<GroundAtom, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            r.body.visit_atoms(&mut |a: &Atom, _| {
                if derived.contains(&a.predicate) {
                    if let Ok(g) = a.to_ground() {
                        let e = deps.entry(g).or_default();
                        if e.last() != Some(&i) {
                            e.push(i);
                        }
                    }
                }
            });
        }
        RuleSet { rules, deps, derived }
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn derived_predicates(&self) -> &BTreeSet<String> {
        &self.derived
    }

    /// The least fixpoint of the rules over `state`.
    pub fn derive(&self, state: &State) -> Result<State, PddlError> {
        let mut view = state.clone();
        let mut fresh: Vec<GroundAtom> = Vec::new();
        for r in &self.rules {
            if !view.contains(&r.head) && eval_formula(&r.body, &view)? {
                view.insert(r.head.clone());
                fresh.push(r.head.clone());
            }
        }
        while !fresh.is_empty() {
            let mut todo: Vec<usize> = fresh.iter().filter_map(|a| self.deps.get(a)).flatten().copied().collect();
            todo.sort_unstable();
            todo.dedup();
            fresh.clear();
            for i in todo {
                let r = &self.rules[i];
                if !view.contains(&r.head) && eval_formula(&r.body, &view)? {
                    view.insert(r.head.clone());
                    fresh.push(r.head.clone());
                }
            }
        }
        Ok(view)
    }
}

/// The state view `D(s)`.
pub fn derive(state: &State, rules: &RuleSet) -> Result<State, PddlError> {
    rules.derive(state)
}

/// Whether the precondition holds in the derived view of `state`.
pub fn applicable(ga: &GroundAction, state: &State, rules: &RuleSet) -> Result<bool, PddlError> {
    eval_formula(&ga.precondition, &rules.derive(state)?)
}

/// `(s \ del) ∪ add`.
pub fn apply(ga: &GroundAction, state: &State) -> State {
    let mut next = state.clone();
    for a in &ga.del {
        next.remove(a);
    }
    for a in &ga.add {
        next.insert(a.clone());
    }
    next
}

/// Applies `ga` after checking its precondition.
pub fn try_apply(ga: &GroundAction, state: &State, rules: &RuleSet) -> Result<State, PddlError> {
    if !applicable(ga, state, rules)? {
        return Err(PddlError::NotApplicable(ga.to_string()));
    }
    Ok(apply(ga, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem, ActionSchema, Domain, Problem};

    fn ga(s: &str) -> GroundAtom {
        let v: Vec<&str> = s.split_whitespace().collect();
        GroundAtom::new(v[0], v[1..].iter().copied())
    }

    fn st(atoms: &[&str]) -> State {
        atoms.iter().map(|a| ga(a)).collect()
    }

    fn rule(head: &str, body: &str) -> DerivationRule {
        DerivationRule {
            head: Atom::new(head, vec![Term::var("x")]),
            body: Formula::Atom(Atom::new(body, vec![Term::var("x")])),
        }
    }

    #[test]
    fn two_variables_three_constants() {
        let d = parse_domain(
            "(define (domain d) (:predicates (p ?x ?y)) (:action a :parameters (?x ?y) :precondition (and) :effect (p ?x ?y))
              (:action n :parameters () :precondition (and) :effect (and)))",
        )
        .unwrap();
        let p = parse_problem("(define (problem q) (:domain d) (:objects c1 c2 c3) (:init) (:goal (and)))", &d).unwrap();
        let g = ground(&PddlSpec { domain: d, problem: p });
        assert_eq!(g.len(), 10);
        assert_eq!(g[1].args, vec!["c1", "c2"]);
        assert_eq!(g[9].name, "n");
        assert!(g[9].args.is_empty());
    }

    #[test]
    fn single_rule_fixpoint() {
        let rs = RuleSet::new(&[rule("p", "q")], &["c".into()]);
        assert_eq!(rs.derive(&st(&["q c"])).unwrap(), st(&["q c", "p c"]));
    }

    #[test]
    fn chained_rules() {
        let rs = RuleSet::new(&[rule("r", "p"), rule("p", "q")], &["c".into(), "e".into()]);
        assert_eq!(rs.derive(&st(&["q e"])).unwrap(), st(&["q e", "p e", "r e"]));
    }

    #[test]
    fn closed_world_negation() {
        let f = Formula::not(Formula::atom(ga("holds stackBot blockA")));
        assert!(eval_formula(&f, &State::new()).unwrap());
    }

    #[test]
    fn equality_by_identity() {
        let eq = |a: &str, b: &str| Formula::Eq(Term::constant(a), Term::constant(b));
        assert!(eval_formula(&eq("stackBot", "stackBot"), &State::new()).unwrap());
        assert!(!eval_formula(&eq("stackBot", "blockA"), &State::new()).unwrap());
        let open = Formula::Eq(Term::var("x"), Term::constant("c"));
        assert_eq!(eval_formula(&open, &State::new()), Err(PddlError::UnboundVariable("x".into())));
    }

    #[test]
    fn quantifiers_rejected_at_evaluation() {
        let f = Formula::Exists(vec!["y".into()], Box::new(Formula::truth()));
        assert_eq!(eval_formula(&f, &State::new()), Err(PddlError::Quantifier));
    }

    fn schema(add: &[&str], del: &[&str]) -> GroundAction {
        let atoms = |v: &[&str]| v.iter().map(|a| Atom::ground(&ga(a))).collect();
        let s = ActionSchema {
            name: "a".into(),
            params: vec![],
            precondition: Formula::truth(),
            add: atoms(add),
            del: atoms(del),
        };
        GroundAction::instantiate(&s, &[])
    }

    #[test]
    fn empty_effects_keep_state() {
        let s = st(&["p c"]);
        assert_eq!(apply(&schema(&[], &[]), &s), s);
    }

    #[test]
    fn delete_then_add() {
        let s = st(&["p c"]);
        assert_eq!(apply(&schema(&["p c"], &["p c"]), &s), s);
        assert_eq!(apply(&schema(&["p c"], &["p c"]), &State::new()), s);
    }

    #[test]
    fn inapplicable_is_an_error() {
        let mut a = schema(&["q c"], &[]);
        a.precondition = Formula::atom(ga("p c"));
        let rs = RuleSet::default();
        assert!(matches!(try_apply(&a, &State::new(), &rs), Err(PddlError::NotApplicable(_))));
        assert_eq!(try_apply(&a, &st(&["p c"]), &rs).unwrap(), st(&["p c", "q c"]));
    }

    #[test]
    fn preconditions_see_derived_atoms() {
        let spec = PddlSpec {
            domain: Domain { rules: vec![rule("p", "q")], ..Default::default() },
            problem: Problem { objects: vec!["c".into()], ..Default::default() },
        };
        let mut a = schema(&[], &[]);
        a.precondition = Formula::atom(ga("p c"));
        assert!(applicable(&a, &st(&["q c"]), &spec.rule_set()).unwrap());
    }
}
