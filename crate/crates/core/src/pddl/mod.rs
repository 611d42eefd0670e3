//! The PDDL subset used by ontology-mediated planning: STRIPS actions with
//! negative and disjunctive preconditions, equality, and derived predicates.

mod eval;
mod parser;
mod printer;
mod sexpr;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use eval::{applicable, apply, derive, eval_formula, ground, try_apply, GroundRule, RuleSet};
pub use parser::{parse_domain, parse_pddl, parse_plan, parse_problem};
pub use printer::{print_domain, print_formula, print_pddl, print_problem};

/// Requirements the parser accepts.
pub const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":equality",
    ":derived-predicates",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
];

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported PDDL feature `{feature}` at {line}:{col}")]
    Unsupported { feature: String, line: usize, col: usize },
    #[error("{message} at {line}:{col}")]
    Invalid { line: usize, col: usize, message: String },
    #[error("derived predicate `{predicate}` occurs negatively in the rule for `{head}`")]
    NegativeDerived { head: String, predicate: String },
    #[error("unbound variable ?{0} during evaluation")]
    UnboundVariable(String),
    #[error("quantified formulas are not supported during evaluation")]
    Quantifier,
    #[error("action {0} is not applicable")]
    NotApplicable(String),
    #[error("unknown action {0}")]
    UnknownAction(String),
}

/// A ground atom `p(c1, ..., cn)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        GroundAtom { predicate: predicate.into(), args: args.into_iter().map(Into::into).collect() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A variable, stored without its leading `?`.
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(v: impl Into<String>) -> Term {
        Term::Var(v.into())
    }

    pub fn constant(c: impl Into<String>) -> Term {
        Term::Const(c.into())
    }

    fn substitute(&self, sigma: &HashMap<&str, &str>) -> Term {
        match self {
            Term::Var(v) => match sigma.get(v.as_str()) {
                Some(c) => Term::Const(c.to_string()),
                None => self.clone(),
            },
            Term::Const(_) => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn ground(g: &GroundAtom) -> Self {
        Atom { predicate: g.predicate.clone(), args: g.args.iter().cloned().map(Term::Const).collect() }
    }

    pub fn substitute(&self, sigma: &HashMap<&str, &str>) -> Atom {
        Atom { predicate: self.predicate.clone(), args: self.args.iter().map(|t| t.substitute(sigma)).collect() }
    }

    /// The ground atom, or the first variable left in it.
    pub fn to_ground(&self) -> Result<GroundAtom, PddlError> {
        let mut args = Vec::with_capacity(self.args.len());
        for t in &self.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                Term::Var(v) => return Err(PddlError::UnboundVariable(v.clone())),
            }
        }
        Ok(GroundAtom { predicate: self.predicate.clone(), args })
    }
}

/// First-order formulas; `And([])` is true and `Or([])` is false.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imply(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Formula {
        Formula::Or(Vec::new())
    }

    pub fn atom(a: GroundAtom) -> Formula {
        Formula::Atom(Atom::ground(&a))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn substitute(&self, sigma: &HashMap<&str, &str>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.substitute(sigma)),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(sigma), b.substitute(sigma)),
            Formula::Not(f) => Formula::Not(Box::new(f.substitute(sigma))),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(sigma)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(sigma)).collect()),
            Formula::Imply(a, b) => Formula::Imply(Box::new(a.substitute(sigma)), Box::new(b.substitute(sigma))),
            Formula::Exists(vs, f) | Formula::Forall(vs, f) => {
                let inner: HashMap<&str, &str> =
                    sigma.iter().filter(|(k, _)| !vs.iter().any(|v| v == *k)).map(|(k, v)| (*k, *v)).collect();
                let body = Box::new(f.substitute(&inner));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(vs.clone(), body)
                } else {
                    Formula::Forall(vs.clone(), body)
                }
            }
        }
    }

    /// Visits every atom with its polarity (true = positive).
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom, bool)) {
        self.visit_polar(true, f)
    }

    fn visit_polar(&self, pos: bool, f: &mut dyn FnMut(&Atom, bool)) {
        match self {
            Formula::Atom(a) => f(a, pos),
            Formula::Eq(..) => {}
            Formula::Not(g) => g.visit_polar(!pos, f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_polar(pos, f)),
            Formula::Imply(a, b) => {
                a.visit_polar(!pos, f);
                b.visit_polar(pos, f);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_polar(pos, f),
        }
    }
}

/// A planning state: a set of ground atoms, shared on clone.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Arc<BTreeSet<GroundAtom>>);

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, a: &GroundAtom) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: GroundAtom) -> bool {
        if self.0.contains(&a) {
            return false;
        }
        Arc::make_mut(&mut self.0).insert(a)
    }

    pub fn remove(&mut self, a: &GroundAtom) -> bool {
        if !self.0.contains(a) {
            return false;
        }
        Arc::make_mut(&mut self.0).remove(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.0.iter()
    }

    pub fn atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.0
    }

    pub fn is_superset(&self, other: &State) -> bool {
        self.0.is_superset(&other.0)
    }

    /// The atoms whose predicate is not in `preds`.
    pub fn without_predicates(&self, preds: &BTreeSet<String>) -> State {
        self.iter().filter(|a| !preds.contains(&a.predicate)).cloned().collect()
    }
}

impl FromIterator<GroundAtom> for State {
    fn from_iter<T: IntoIterator<Item = GroundAtom>>(iter: T) -> Self {
        State(Arc::new(iter.into_iter().collect()))
    }
}

impl<'a> IntoIterator for &'a State {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    /// Parameter names without `?`.
    pub params: Vec<String>,
}

impl PredicateDecl {
    pub fn new(name: impl Into<String>, params: impl IntoIterator<Item = impl Into<String>>) -> Self {
        PredicateDecl { name: name.into(), params: params.into_iter().map(Into::into).collect() }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub precondition: Formula,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

/// `head <- body`; the head may be partially or fully ground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationRule {
    pub head: Atom,
    pub body: Formula,
}

/// A declared type; `parent: None` means `object`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<String>,
    pub constant_types: BTreeMap<String, String>,
    pub predicates: Vec<PredicateDecl>,
    pub rules: Vec<DerivationRule>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// Names of the predicates defined by derivation rules.
    pub fn derived_predicates(&self) -> BTreeSet<String> {
        self.rules.iter().map(|r| r.head.predicate.clone()).collect()
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<String>,
    pub init: State,
    pub goal: Formula,
}

impl Default for Problem {
    fn default() -> Self {
        Problem {
            name: String::new(),
            domain: String::new(),
            objects: Vec::new(),
            init: State::new(),
            goal: Formula::truth(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PddlSpec {
    pub domain: Domain,
    pub problem: Problem,
}

impl PddlSpec {
    /// Domain constants followed by problem objects, without repetition.
    pub fn constants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in self.domain.constants.iter().chain(&self.problem.objects) {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        out
    }

    pub fn derived_predicates(&self) -> BTreeSet<String> {
        self.domain.derived_predicates()
    }

    /// The derivation rules instantiated over the constants.
    pub fn rule_set(&self) -> RuleSet {
        RuleSet::new(&self.domain.rules, &self.constants())
    }

    /// The ground action `(name args...)`, checked against the schema arity.
    pub fn instantiate(&self, name: &str, args: &[String]) -> Result<GroundAction, PddlError> {
        let schema = self.domain.action(name).ok_or_else(|| PddlError::UnknownAction(name.to_string()))?;
        let consts = self.constants();
        if schema.params.len() != args.len() || args.iter().any(|a| !consts.contains(a)) {
            let shown = GroundAction::label(name, args);
            return Err(PddlError::UnknownAction(shown));
        }
        Ok(GroundAction::instantiate(schema, args))
    }
}

/// An action schema under a substitution of its parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    /// The substitution, as the constants assigned to the parameters in order.
    pub args: Vec<String>,
    pub precondition: Formula,
    pub add: Vec<GroundAtom>,
    pub del: Vec<GroundAtom>,
}

impl GroundAction {
    pub fn instantiate(schema: &ActionSchema, args: &[String]) -> GroundAction {
        let sigma: HashMap<&str, &str> =
            schema.params.iter().map(String::as_str).zip(args.iter().map(String::as_str)).collect();
        let ground = |a: &Atom| a.substitute(&sigma).to_ground().expect("effect variables are parameters");
        GroundAction {
            name: schema.name.clone(),
            args: args.to_vec(),
            precondition: schema.precondition.substitute(&sigma),
            add: schema.add.iter().map(ground).collect(),
            del: schema.del.iter().map(ground).collect(),
        }
    }

    fn label(name: &str, args: &[String]) -> String {
        let mut s = format!("({name}");
        for a in args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&GroundAction::label(&self.name, &self.args))
    }
}
