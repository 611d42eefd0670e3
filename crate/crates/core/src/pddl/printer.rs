//! Deterministic PDDL emission: lowercase keywords, two-space indentation,
//! declaration order for declarations and sorted initial states. Output is
//! untyped: types appear as the unary predicates they were compiled to.

use std::fmt::Write;

use super::{Atom, Domain, Formula, PddlSpec, Problem, Term};

const WIDTH: usize = 100;

fn atom(a: &Atom) -> String {
    let mut s = format!("({}", a.predicate);
    for t in &a.args {
        let _ = write!(s, " {t}");
    }
    s.push(')');
    s
}

fn vars(vs: &[String]) -> String {
    vs.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")
}

fn inline(f: &Formula) -> String {
    match f {
        Formula::Atom(a) => atom(a),
        Formula::Eq(a, b) => format!("(= {a} {b})"),
        Formula::Not(g) => format!("(not {})", inline(g)),
        Formula::And(gs) | Formula::Or(gs) => {
            let op = if matches!(f, Formula::And(_)) { "and" } else { "or" };
            let mut s = format!("({op}");
            for g in gs {
                s.push(' ');
                s.push_str(&inline(g));
            }
            s.push(')');
            s
        }
        Formula::Imply(a, b) => format!("(imply {} {})", inline(a), inline(b)),
        Formula::Exists(vs, g) => format!("(exists ({}) {})", vars(vs), inline(g)),
        Formula::Forall(vs, g) => format!("(forall ({}) {})", vars(vs), inline(g)),
    }
}

/// Renders a formula at the given indentation, breaking long conjunctions
/// and disjunctions one operand per line.
pub fn print_formula(f: &Formula, indent: usize) -> String {
    let flat = inline(f);
    if indent + flat.len() <= WIDTH {
        return flat;
    }
    let pad = " ".repeat(indent + 2);
    match f {
        Formula::And(gs) | Formula::Or(gs) if !gs.is_empty() => {
            let op = if matches!(f, Formula::And(_)) { "and" } else { "or" };
            let mut s = format!("({op}");
            for g in gs {
                let _ = write!(s, "\n{pad}{}", print_formula(g, indent + 2));
            }
            s.push(')');
            s
        }
        Formula::Not(g) => format!("(not {})", print_formula(g, indent + 5)),
        Formula::Imply(a, b) => {
            format!("(imply\n{pad}{}\n{pad}{})", print_formula(a, indent + 2), print_formula(b, indent + 2))
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let op = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            format!("({op} ({})\n{pad}{})", vars(vs), print_formula(g, indent + 2))
        }
        _ => flat,
    }
}

pub fn print_domain(d: &Domain) -> String {
    let mut s = format!("(define (domain {})\n", d.name);
    // typing is already compiled into unary predicates and guards
    let reqs: Vec<&str> = d.requirements.iter().map(String::as_str).filter(|r| *r != ":typing").collect();
    if !reqs.is_empty() {
        let _ = writeln!(s, "  (:requirements {})", reqs.join(" "));
    }
    if !d.constants.is_empty() {
        let _ = writeln!(s, "  (:constants {})", d.constants.join(" "));
    }
    if !d.predicates.is_empty() {
        s.push_str("  (:predicates");
        for p in &d.predicates {
            let ps = if p.params.is_empty() { String::new() } else { format!(" {}", vars(&p.params)) };
            let _ = write!(s, "\n    ({}{ps})", p.name);
        }
        s.push_str(")\n");
    }
    for r in &d.rules {
        let _ = writeln!(s, "  (:derived {}\n    {})", atom(&r.head), print_formula(&r.body, 4));
    }
    for a in &d.actions {
        let mut effect: Vec<Formula> = a.add.iter().cloned().map(Formula::Atom).collect();
        effect.extend(a.del.iter().cloned().map(|x| Formula::not(Formula::Atom(x))));
        let _ = writeln!(
            s,
            "  (:action {}\n    :parameters ({})\n    :precondition {}\n    :effect {})",
            a.name,
            vars(&a.params),
            print_formula(&a.precondition, 18),
            print_formula(&Formula::And(effect), 12),
        );
    }
    s.push_str(")\n");
    s
}

pub fn print_problem(p: &Problem) -> String {
    let mut s = format!("(define (problem {})\n  (:domain {})\n", p.name, p.domain);
    if !p.objects.is_empty() {
        let _ = writeln!(s, "  (:objects {})", p.objects.join(" "));
    }
    s.push_str("  (:init");
    for a in &p.init {
        let ga = Atom::new(a.predicate.clone(), a.args.iter().cloned().map(Term::Const).collect());
        let _ = write!(s, "\n    {}", atom(&ga));
    }
    s.push_str(")\n");
    let _ = writeln!(s, "  (:goal {})", print_formula(&p.goal, 9));
    s.push_str(")\n");
    s
}

/// The domain and problem texts.
pub fn print_pddl(spec: &PddlSpec) -> (String, String) {
    (print_domain(&spec.domain), print_problem(&spec.problem))
}
