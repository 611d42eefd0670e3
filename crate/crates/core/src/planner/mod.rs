//! Forward A* search over ground specifications with derived predicates,
//! plus plan replay and the plan file format.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::pddl::{apply, eval_formula, ground, Formula, GroundAction, PddlError, PddlSpec, RuleSet, State, Term};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("unknown heuristic `{0}` (expected zero or goal-count)")]
    UnknownHeuristic(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    /// Uniform-cost search; plans are length-optimal.
    #[default]
    Zero,
    /// Number of top-level goal conjuncts false in the derived view; not
    /// admissible, so plans may be longer than optimal.
    GoalCount,
}

impl FromStr for Heuristic {
    type Err = PlannerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Heuristic::Zero),
            "goal-count" => Ok(Heuristic::GoalCount),
            other => Err(PlannerError::UnknownHeuristic(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PlannerConfig {
    pub heuristic: Heuristic,
    pub time_limit: Option<Duration>,
    /// Maximum number of stored search nodes.
    pub max_states: Option<usize>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig { heuristic: Heuristic::Zero, time_limit: None, max_states: Some(5_000_000) }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PlannerStats {
    /// States whose successors were generated.
    pub expanded: u64,
    /// Distinct states added to the open list.
    pub evaluated: u64,
    pub derive_calls: u64,
    pub ground_actions: u64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Plan(Vec<GroundAction>),
    /// The reachable space holds no goal state.
    Unsolvable,
    Timeout,
    MemoryLimit,
}

impl SearchOutcome {
    pub fn plan(&self) -> Option<&[GroundAction]> {
        match self {
            SearchOutcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchOutcome::Plan(p) => write!(f, "plan of length {}", p.len()),
            SearchOutcome::Unsolvable => f.write_str("unsolvable"),
            SearchOutcome::Timeout => f.write_str("time limit reached"),
            SearchOutcome::MemoryLimit => f.write_str("state limit reached"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub stats: PlannerStats,
}

/// Predicates no action changes and no rule derives.
fn static_predicates(spec: &PddlSpec) -> BTreeSet<String> {
    let d = &spec.domain;
    let derived = d.derived_predicates();
    let changed: BTreeSet<&str> =
        d.actions.iter().flat_map(|a| a.add.iter().chain(&a.del)).map(|x| x.predicate.as_str()).collect();
    d.predicates
        .iter()
        .map(|p| p.name.clone())
        .filter(|p| !derived.contains(p) && !changed.contains(p.as_str()))
        .collect()
}

/// Whether a top-level conjunct is false for good: a static literal that
/// fails in the initial state or a false equality.
fn statically_false(f: &Formula, statics: &BTreeSet<String>, init: &State) -> bool {
    let conjuncts: &[Formula] = match f {
        Formula::And(fs) => fs,
        other => std::slice::from_ref(other),
    };
    conjuncts.iter().any(|c| match c {
        Formula::Atom(a) => statics.contains(&a.predicate) && a.to_ground().is_ok_and(|g| !init.contains(&g)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(a) => statics.contains(&a.predicate) && a.to_ground().is_ok_and(|g| init.contains(&g)),
            Formula::Eq(Term::Const(x), Term::Const(y)) => x == y,
            _ => false,
        },
        Formula::Eq(Term::Const(x), Term::Const(y)) => x != y,
        _ => false,
    })
}

/// The ground actions whose preconditions can ever hold, in grounding order.
pub fn relevant_actions(spec: &PddlSpec) -> Vec<GroundAction> {
    let statics = static_predicates(spec);
    let init = &spec.problem.init;
    ground(spec).into_iter().filter(|a| !statically_false(&a.precondition, &statics, init)).collect()
}

fn goal_count(goal: &Formula, view: &State) -> Result<u64, PddlError> {
    Ok(match goal {
        Formula::And(fs) => {
            let mut n = 0;
            for g in fs {
                if !eval_formula(g, view)? {
                    n += 1;
                }
            }
            n
        }
        other => u64::from(!eval_formula(other, view)?),
    })
}

struct Node {
    state: State,
    g: u64,
    parent: Option<(usize, usize)>,
}

/// A* from the initial state; among equal `f` the earliest generated node
/// is expanded first, and successors follow grounding order.
pub fn solve(spec: &PddlSpec, config: &PlannerConfig) -> Result<SearchResult, PlannerError> {
    let start = Instant::now();
    let rules = spec.rule_set();
    let goal = &spec.problem.goal;
    let actions = relevant_actions(spec);
    let mut stats = PlannerStats { ground_actions: actions.len() as u64, ..PlannerStats::default() };
    let init = spec.problem.init.without_predicates(rules.derived_predicates());

    let derive = |s: &State, stats: &mut PlannerStats| {
        stats.derive_calls += 1;
        rules.derive(s)
    };
    let h = |view: &State| -> Result<u64, PddlError> {
        match config.heuristic {
            Heuristic::Zero => Ok(0),
            Heuristic::GoalCount => goal_count(goal, view),
        }
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<State, u64> = HashMap::new();
    let mut open: BinaryHeap<Reverse<(u64, u64, usize)>> = BinaryHeap::new();
    let h0 = match config.heuristic {
        Heuristic::Zero => 0,
        Heuristic::GoalCount => h(&derive(&init, &mut stats)?)?,
    };
    best.insert(init.clone(), 0);
    nodes.push(Node { state: init, g: 0, parent: None });
    open.push(Reverse((h0, 0, 0)));
    stats.evaluated = 1;
    let mut seq = 1u64;

    let finish = |outcome, mut stats: PlannerStats| {
        stats.wall_ms = start.elapsed().as_millis() as u64;
        Ok(SearchResult { outcome, stats })
    };

    while let Some(Reverse((_, _, id))) = open.pop() {
        let (g, state) = (nodes[id].g, nodes[id].state.clone());
        if best.get(&state).is_some_and(|&b| b < g) {
            continue;
        }
        if let Some(limit) = config.time_limit {
            if stats.expanded % 64 == 0 && start.elapsed() > limit {
                return finish(SearchOutcome::Timeout, stats);
            }
        }
        let view = derive(&state, &mut stats)?;
        if eval_formula(goal, &view)? {
            let mut plan = Vec::new();
            let mut cur = id;
            while let Some((p, a)) = nodes[cur].parent {
                plan.push(actions[a].clone());
                cur = p;
            }
            plan.reverse();
            return finish(SearchOutcome::Plan(plan), stats);
        }
        stats.expanded += 1;
        for (ai, a) in actions.iter().enumerate() {
            if !eval_formula(&a.precondition, &view)? {
                continue;
            }
            let next = apply(a, &state);
            let ng = g + 1;
            if best.get(&next).is_some_and(|&b| b <= ng) {
                continue;
            }
            let hn = match config.heuristic {
                Heuristic::Zero => 0,
                Heuristic::GoalCount => h(&derive(&next, &mut stats)?)?,
            };
            if config.max_states.is_some_and(|m| nodes.len() >= m) {
                return finish(SearchOutcome::MemoryLimit, stats);
            }
            best.insert(next.clone(), ng);
            nodes.push(Node { state: next, g: ng, parent: Some((id, ai)) });
            open.push(Reverse((ng + hn, seq, nodes.len() - 1)));
            seq += 1;
            stats.evaluated += 1;
        }
    }
    finish(SearchOutcome::Unsolvable, stats)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayVerdict {
    Accept,
    /// The action at `step` is not applicable.
    Inapplicable { step: usize, action: String },
    /// The final state misses the goal.
    GoalUnsatisfied,
}

impl ReplayVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, ReplayVerdict::Accept)
    }
}

impl fmt::Display for ReplayVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayVerdict::Accept => f.write_str("accept"),
            ReplayVerdict::Inapplicable { step, action } => write!(f, "reject at step {step}: {action} not applicable"),
            ReplayVerdict::GoalUnsatisfied => f.write_str("reject: goal not satisfied"),
        }
    }
}

/// Replays `plan` from the initial state under plain PDDL semantics.
pub fn replay(spec: &PddlSpec, plan: &[GroundAction]) -> Result<ReplayVerdict, PlannerError> {
    let rules: RuleSet = spec.rule_set();
    let mut s = spec.problem.init.without_predicates(rules.derived_predicates());
    for (i, a) in plan.iter().enumerate() {
        if !eval_formula(&a.precondition, &rules.derive(&s)?)? {
            return Ok(ReplayVerdict::Inapplicable { step: i, action: a.to_string() });
        }
        s = apply(a, &s);
    }
    if eval_formula(&spec.problem.goal, &rules.derive(&s)?)? {
        Ok(ReplayVerdict::Accept)
    } else {
        Ok(ReplayVerdict::GoalUnsatisfied)
    }
}

/// One `(name arg...)` line per action.
pub fn format_plan(plan: &[GroundAction]) -> String {
    plan.iter().map(|a| format!("{a}\n")).collect()
}
