//! Domain, problem and plan readers for the supported PDDL subset.
//!
//! Typing is compiled away: every type becomes a unary predicate, typed
//! parameters add type atoms to preconditions and rule bodies, and typed
//! objects add their type atoms (including supertypes) to the initial state.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::sexpr::{invalid, read, read_all, syntax, unsupported, Pos, Sx};
use super::{
    ActionSchema, Atom, DerivationRule, Domain, Formula, GroundAction, GroundAtom, PddlError, PddlSpec,
    PredicateDecl, Problem, State, Term, TypeDecl, SUPPORTED_REQUIREMENTS,
};

const NUMERIC_EFFECTS: &[&str] = &["increase", "decrease", "assign", "scale-up", "scale-down"];

fn keyword(sx: &Sx) -> Option<String> {
    sx.sym().filter(|s| s.starts_with(':')).map(str::to_ascii_lowercase)
}

fn name(sx: &Sx, what: &str) -> Result<String, PddlError> {
    match sx.sym() {
        Some(s) if !s.starts_with('?') && !s.starts_with(':') => Ok(s.to_string()),
        _ => Err(syntax(sx.pos(), format!("expected {what}"))),
    }
}

fn list<'a>(sx: &'a Sx, what: &str) -> Result<&'a [Sx], PddlError> {
    sx.list().ok_or_else(|| syntax(sx.pos(), format!("expected {what}")))
}

/// A typed list `a b - t c`; untyped names get `None`.
fn typed_list(items: &[Sx], vars: bool) -> Result<Vec<(String, Option<Vec<String>>, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let it = &items[i];
        if it.sym() == Some("-") {
            let ty = items.get(i + 1).ok_or_else(|| syntax(it.pos(), "missing type after `-`"))?;
            let tys = match ty {
                Sx::Sym(..) => vec![name(ty, "a type")?],
                Sx::List(v, p) => {
                    if ty.head().as_deref() != Some("either") {
                        return Err(syntax(*p, "expected a type or (either ...)"));
                    }
                    v[1..].iter().map(|t| name(t, "a type")).collect::<Result<_, _>>()?
                }
            };
            for (n, p) in pending.drain(..) {
                out.push((n, Some(tys.clone()), p));
            }
            i += 2;
            continue;
        }
        let s = it.sym().ok_or_else(|| syntax(it.pos(), "expected a name"))?;
        let n = if vars {
            s.strip_prefix('?').ok_or_else(|| syntax(it.pos(), "expected a variable"))?.to_string()
        } else {
            name(it, "a name")?
        };
        pending.push((n, it.pos()));
        i += 1;
    }
    out.extend(pending.into_iter().map(|(n, p)| (n, None, p)));
    Ok(out)
}

struct Ctx<'a> {
    preds: HashMap<String, usize>,
    constants: &'a HashSet<String>,
    types: &'a HashMap<String, Option<String>>,
}

impl Ctx<'_> {
    fn check_type(&self, t: &str, pos: Pos) -> Result<(), PddlError> {
        if t == "object" || self.types.contains_key(t) {
            Ok(())
        } else {
            Err(invalid(pos, format!("undeclared type `{t}`")))
        }
    }

    /// Type atoms for a typed variable; `object` imposes nothing.
    fn type_guard(&self, var: &str, tys: &Option<Vec<String>>, pos: Pos) -> Result<Option<Formula>, PddlError> {
        let Some(tys) = tys else { return Ok(None) };
        for t in tys {
            self.check_type(t, pos)?;
        }
        if tys.iter().any(|t| t == "object") {
            return Ok(None);
        }
        let atoms: Vec<Formula> =
            tys.iter().map(|t| Formula::Atom(Atom::new(t.clone(), vec![Term::Var(var.to_string())]))).collect();
        Ok(Some(if atoms.len() == 1 { atoms.into_iter().next().unwrap() } else { Formula::Or(atoms) }))
    }

    fn term(&self, sx: &Sx, scope: &[String]) -> Result<Term, PddlError> {
        let s = sx.sym().ok_or_else(|| syntax(sx.pos(), "expected a term"))?;
        if let Some(v) = s.strip_prefix('?') {
            if !scope.iter().any(|x| x == v) {
                return Err(invalid(sx.pos(), format!("unbound variable ?{v}")));
            }
            Ok(Term::Var(v.to_string()))
        } else if self.constants.contains(s) {
            Ok(Term::Const(s.to_string()))
        } else {
            Err(invalid(sx.pos(), format!("undeclared constant `{s}`")))
        }
    }

    fn atom(&self, sx: &Sx, scope: &[String]) -> Result<Atom, PddlError> {
        let v = list(sx, "an atom")?;
        let p = name(v.first().ok_or_else(|| syntax(sx.pos(), "empty atom"))?, "a predicate")?;
        let arity = *self.preds.get(&p).ok_or_else(|| invalid(sx.pos(), format!("undeclared predicate `{p}`")))?;
        if arity != v.len() - 1 {
            return Err(invalid(sx.pos(), format!("predicate `{p}` expects {arity} arguments, got {}", v.len() - 1)));
        }
        let args = v[1..].iter().map(|t| self.term(t, scope)).collect::<Result<_, _>>()?;
        Ok(Atom::new(p, args))
    }

    fn formula(&self, sx: &Sx, scope: &[String]) -> Result<Formula, PddlError> {
        let v = list(sx, "a formula")?;
        if v.is_empty() {
            return Ok(Formula::truth());
        }
        let head = sx.head().unwrap_or_default();
        let sub = |i: usize| -> Result<Formula, PddlError> {
            self.formula(v.get(i).ok_or_else(|| syntax(sx.pos(), format!("`{head}` is missing an operand")))?, scope)
        };
        match head.as_str() {
            "and" | "or" => {
                let parts = v[1..].iter().map(|f| self.formula(f, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" { Formula::And(parts) } else { Formula::Or(parts) })
            }
            "not" => {
                if v.len() != 2 {
                    return Err(syntax(sx.pos(), "`not` takes one operand"));
                }
                Ok(Formula::Not(Box::new(sub(1)?)))
            }
            "imply" => {
                if v.len() != 3 {
                    return Err(syntax(sx.pos(), "`imply` takes two operands"));
                }
                Ok(Formula::Imply(Box::new(sub(1)?), Box::new(sub(2)?)))
            }
            "=" => {
                if v.len() != 3 {
                    return Err(syntax(sx.pos(), "`=` takes two terms"));
                }
                Ok(Formula::Eq(self.term(&v[1], scope)?, self.term(&v[2], scope)?))
            }
            "exists" | "forall" => {
                if v.len() != 3 {
                    return Err(syntax(sx.pos(), format!("`{head}` takes a variable list and a body")));
                }
                let vars = typed_list(list(&v[1], "a variable list")?, true)?;
                let mut inner = scope.to_vec();
                inner.extend(vars.iter().map(|(n, _, _)| n.clone()));
                let body = self.formula(&v[2], &inner)?;
                let mut guards = Vec::new();
                for (n, t, p) in &vars {
                    guards.extend(self.type_guard(n, t, *p)?);
                }
                let names = vars.into_iter().map(|(n, _, _)| n).collect();
                if head == "exists" {
                    let body = if guards.is_empty() { body } else { conj(guards, body) };
                    Ok(Formula::Exists(names, Box::new(body)))
                } else {
                    let body = if guards.is_empty() {
                        body
                    } else {
                        Formula::Imply(Box::new(Formula::And(guards)), Box::new(body))
                    };
                    Ok(Formula::Forall(names, Box::new(body)))
                }
            }
            "when" => Err(unsupported(sx.pos(), "conditional effects")),
            h if matches!(h, "<" | ">" | "<=" | ">=") => Err(unsupported(sx.pos(), "numeric fluents")),
            _ => Ok(Formula::Atom(self.atom(sx, scope)?)),
        }
    }

    fn effect(&self, sx: &Sx, scope: &[String], add: &mut Vec<Atom>, del: &mut Vec<Atom>) -> Result<(), PddlError> {
        let v = list(sx, "an effect")?;
        if v.is_empty() {
            return Ok(());
        }
        match sx.head().unwrap_or_default().as_str() {
            "and" => {
                for e in &v[1..] {
                    self.effect(e, scope, add, del)?;
                }
                Ok(())
            }
            "not" => {
                if v.len() != 2 {
                    return Err(syntax(sx.pos(), "`not` takes one operand"));
                }
                del.push(self.atom(&v[1], scope)?);
                Ok(())
            }
            "when" => Err(unsupported(sx.pos(), "conditional effects")),
            "forall" => Err(unsupported(sx.pos(), "universal effects")),
            h if NUMERIC_EFFECTS.contains(&h) => Err(unsupported(sx.pos(), "numeric fluents")),
            _ => {
                add.push(self.atom(sx, scope)?);
                Ok(())
            }
        }
    }
}

fn conj(mut guards: Vec<Formula>, body: Formula) -> Formula {
    match body {
        Formula::And(v) => {
            guards.extend(v);
            Formula::And(guards)
        }
        other => {
            guards.push(other);
            Formula::And(guards)
        }
    }
}

fn define<'a>(sx: &'a Sx, kind: &str) -> Result<(String, &'a [Sx]), PddlError> {
    let v = list(sx, "(define ...)")?;
    if sx.head().as_deref() != Some("define") || v.len() < 2 {
        return Err(syntax(sx.pos(), "expected (define ...)"));
    }
    let h = list(&v[1], "a header")?;
    if v[1].head().as_deref() != Some(kind) || h.len() != 2 {
        return Err(syntax(v[1].pos(), format!("expected ({kind} <name>)")));
    }
    Ok((name(&h[1], "a name")?, &v[2..]))
}

fn section_key(sx: &Sx) -> Result<String, PddlError> {
    sx.list().and_then(|v| v.first()).and_then(keyword).ok_or_else(|| syntax(sx.pos(), "expected a section"))
}

/// Parses a domain file.
pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let sx = read(text)?;
    let (dname, sections) = define(&sx, "domain")?;
    let mut d = Domain { name: dname, ..Default::default() };
    let mut types: HashMap<String, Option<String>> = HashMap::new();
    let mut consts: HashSet<String> = HashSet::new();
    let mut preds: HashMap<String, usize> = HashMap::new();
    let mut raw_actions: Vec<&Sx> = Vec::new();
    let mut raw_rules: Vec<&Sx> = Vec::new();
    for s in sections {
        let v = s.list().unwrap_or(&[]);
        match section_key(s)?.as_str() {
            ":requirements" => {
                for r in &v[1..] {
                    let k = keyword(r).ok_or_else(|| syntax(r.pos(), "expected a requirement"))?;
                    if !SUPPORTED_REQUIREMENTS.contains(&k.as_str()) {
                        return Err(unsupported(r.pos(), format!("requirement {k}")));
                    }
                    d.requirements.push(k);
                }
            }
            ":types" => {
                for (n, parent, p) in typed_list(&v[1..], false)? {
                    let parent = match parent {
                        Some(ps) if ps.len() == 1 => Some(ps[0].clone()),
                        Some(_) => return Err(unsupported(p, "either in type declarations")),
                        None => None,
                    };
                    let parent = parent.filter(|t| t != "object");
                    if n == "object" {
                        continue;
                    }
                    types.insert(n.clone(), parent.clone());
                    d.types.push(TypeDecl { name: n, parent });
                }
            }
            ":constants" => {
                for (n, ty, p) in typed_list(&v[1..], false)? {
                    let ty = match ty {
                        Some(ts) if ts.len() == 1 => Some(ts[0].clone()),
                        Some(_) => return Err(unsupported(p, "either in constant declarations")),
                        None => None,
                    };
                    if !consts.insert(n.clone()) {
                        return Err(invalid(p, format!("constant `{n}` declared twice")));
                    }
                    d.constants.push(n.clone());
                    if let Some(t) = ty {
                        d.constant_types.insert(n, t);
                    }
                }
            }
            ":predicates" => {
                for p in &v[1..] {
                    let pv = list(p, "a predicate declaration")?;
                    let pname = name(pv.first().ok_or_else(|| syntax(p.pos(), "empty declaration"))?, "a predicate")?;
                    let params = typed_list(&pv[1..], true)?;
                    if preds.insert(pname.clone(), params.len()).is_some() {
                        return Err(invalid(p.pos(), format!("predicate `{pname}` declared twice")));
                    }
                    d.predicates.push(PredicateDecl::new(pname, params.into_iter().map(|(n, _, _)| n)));
                }
            }
            ":action" => raw_actions.push(s),
            ":derived" => raw_rules.push(s),
            ":functions" => return Err(unsupported(s.pos(), "numeric fluents")),
            ":durative-action" => return Err(unsupported(s.pos(), "durative actions")),
            ":constraints" => return Err(unsupported(s.pos(), "constraints")),
            other => return Err(unsupported(s.pos(), format!("section {other}"))),
        }
    }
    let tpos = sections.first().map(Sx::pos).unwrap_or(sx.pos());
    for t in &d.types {
        if let Some(p) = &t.parent {
            if !types.contains_key(p) {
                return Err(invalid(tpos, format!("undeclared type `{p}`")));
            }
        }
        match preds.get(&t.name) {
            Some(1) => {}
            Some(_) => return Err(invalid(tpos, format!("type `{}` clashes with a predicate", t.name))),
            None => {
                preds.insert(t.name.clone(), 1);
                d.predicates.push(PredicateDecl::new(t.name.clone(), ["x"]));
            }
        }
    }
    for (c, t) in &d.constant_types {
        if t != "object" && !types.contains_key(t) {
            return Err(invalid(tpos, format!("undeclared type `{t}` for constant `{c}`")));
        }
    }
    let ctx = Ctx { preds, constants: &consts, types: &types };
    for s in raw_rules {
        d.rules.push(parse_rule(&ctx, s)?);
    }
    let derived = d.derived_predicates();
    for r in &d.rules {
        check_positive(r, &derived)?;
    }
    for s in raw_actions {
        let a = parse_action(&ctx, s)?;
        if let Some(bad) = a.add.iter().chain(&a.del).find(|x| derived.contains(&x.predicate)) {
            return Err(invalid(s.pos(), format!("action `{}` changes derived predicate `{}`", a.name, bad.predicate)));
        }
        d.actions.push(a);
    }
    Ok(d)
}

fn parse_rule(ctx: &Ctx, s: &Sx) -> Result<DerivationRule, PddlError> {
    let v = s.list().unwrap();
    if v.len() != 3 {
        return Err(syntax(s.pos(), "expected (:derived <head> <body>)"));
    }
    let hv = list(&v[1], "a rule head")?;
    let pname = name(hv.first().ok_or_else(|| syntax(v[1].pos(), "empty head"))?, "a predicate")?;
    let mut scope = Vec::new();
    let mut guards = Vec::new();
    let mut args = Vec::new();
    let mut i = 1;
    while i < hv.len() {
        let it = &hv[i];
        match it.sym() {
            Some(x) if x.starts_with('?') => {
                let typed = hv.get(i + 1).and_then(Sx::sym) == Some("-");
                let tys = if typed {
                    let ty = hv.get(i + 2).ok_or_else(|| syntax(it.pos(), "missing type"))?;
                    i += 2;
                    Some(vec![name(ty, "a type")?])
                } else {
                    None
                };
                let var = x[1..].to_string();
                guards.extend(ctx.type_guard(&var, &tys, it.pos())?);
                scope.push(var.clone());
                args.push(Term::Var(var));
            }
            _ => args.push(ctx.term(it, &scope)?),
        }
        i += 1;
    }
    let arity = *ctx.preds.get(&pname).ok_or_else(|| invalid(v[1].pos(), format!("undeclared predicate `{pname}`")))?;
    if arity != args.len() {
        return Err(invalid(v[1].pos(), format!("predicate `{pname}` expects {arity} arguments")));
    }
    let body = ctx.formula(&v[2], &scope)?;
    let body = if guards.is_empty() { body } else { conj(guards, body) };
    Ok(DerivationRule { head: Atom::new(pname, args), body })
}

fn check_positive(r: &DerivationRule, derived: &BTreeSet<String>) -> Result<(), PddlError> {
    let mut bad = None;
    r.body.visit_atoms(&mut |a, pos| {
        if !pos && derived.contains(&a.predicate) && bad.is_none() {
            bad = Some(a.predicate.clone());
        }
    });
    match bad {
        Some(p) => Err(PddlError::NegativeDerived { head: r.head.predicate.clone(), predicate: p }),
        None => Ok(()),
    }
}

fn parse_action(ctx: &Ctx, s: &Sx) -> Result<ActionSchema, PddlError> {
    let v = s.list().unwrap();
    let aname = name(v.get(1).ok_or_else(|| syntax(s.pos(), "missing action name"))?, "an action name")?;
    let mut params = Vec::new();
    let mut guards = Vec::new();
    let mut pre = Formula::truth();
    let mut add = Vec::new();
    let mut del = Vec::new();
    let mut i = 2;
    while i < v.len() {
        let k = keyword(&v[i]).ok_or_else(|| syntax(v[i].pos(), "expected an action keyword"))?;
        let val = v.get(i + 1).ok_or_else(|| syntax(v[i].pos(), format!("{k} is missing its value")))?;
        match k.as_str() {
            ":parameters" => {
                for (n, t, p) in typed_list(list(val, "a parameter list")?, true)? {
                    guards.extend(ctx.type_guard(&n, &t, p)?);
                    params.push(n);
                }
            }
            ":precondition" => pre = ctx.formula(val, &params)?,
            ":effect" => ctx.effect(val, &params, &mut add, &mut del)?,
            other => return Err(unsupported(v[i].pos(), format!("action field {other}"))),
        }
        i += 2;
    }
    let precondition = if guards.is_empty() { pre } else { conj(guards, pre) };
    Ok(ActionSchema { name: aname, params, precondition, add, del })
}

fn type_closure(t: &str, types: &HashMap<String, Option<String>>) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = Some(t.to_string());
    while let Some(c) = cur {
        if c == "object" || out.contains(&c) {
            break;
        }
        cur = types.get(&c).cloned().flatten();
        out.push(c);
    }
    out
}

/// Parses a problem file against its domain.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
    let sx = read(text)?;
    let (pname, sections) = define(&sx, "problem")?;
    let types: HashMap<String, Option<String>> =
        domain.types.iter().map(|t| (t.name.clone(), t.parent.clone())).collect();
    let mut consts: HashSet<String> = domain.constants.iter().cloned().collect();
    let mut pb = Problem { name: pname, ..Default::default() };
    let mut init: Vec<GroundAtom> = Vec::new();
    for (c, t) in &domain.constant_types {
        for ty in type_closure(t, &types) {
            init.push(GroundAtom::new(ty, [c.clone()]));
        }
    }
    let preds: HashMap<String, usize> = domain.predicates.iter().map(|p| (p.name.clone(), p.arity())).collect();
    let derived = domain.derived_predicates();
    let mut raw_init: Option<&Sx> = None;
    let mut raw_goal: Option<&Sx> = None;
    for s in sections {
        let v = s.list().unwrap_or(&[]);
        match section_key(s)?.as_str() {
            ":domain" => {
                let d = name(v.get(1).ok_or_else(|| syntax(s.pos(), "missing domain name"))?, "a domain name")?;
                if !d.eq_ignore_ascii_case(&domain.name) {
                    return Err(invalid(s.pos(), format!("problem is for domain `{d}`, not `{}`", domain.name)));
                }
                pb.domain = d;
            }
            ":objects" => {
                for (n, ty, p) in typed_list(&v[1..], false)? {
                    if consts.contains(&n) {
                        return Err(invalid(p, format!("object `{n}` declared twice")));
                    }
                    consts.insert(n.clone());
                    pb.objects.push(n.clone());
                    for t in ty.unwrap_or_default() {
                        if t != "object" && !types.contains_key(&t) {
                            return Err(invalid(p, format!("undeclared type `{t}`")));
                        }
                        for c in type_closure(&t, &types) {
                            init.push(GroundAtom::new(c, [n.clone()]));
                        }
                    }
                }
            }
            ":init" => raw_init = Some(s),
            ":goal" => raw_goal = Some(s),
            ":metric" => return Err(unsupported(s.pos(), "metrics")),
            ":constraints" => return Err(unsupported(s.pos(), "constraints")),
            other => return Err(unsupported(s.pos(), format!("section {other}"))),
        }
    }
    let ctx = Ctx { preds, constants: &consts, types: &types };
    if let Some(s) = raw_init {
        for a in &s.list().unwrap()[1..] {
            if a.head().as_deref() == Some("=") {
                return Err(unsupported(a.pos(), "numeric fluents"));
            }
            let atom = ctx.atom(a, &[])?;
            if derived.contains(&atom.predicate) {
                return Err(invalid(a.pos(), format!("derived predicate `{}` in the initial state", atom.predicate)));
            }
            init.push(atom.to_ground()?);
        }
    }
    pb.init = init.into_iter().collect::<State>();
    if let Some(s) = raw_goal {
        let v = s.list().unwrap();
        if v.len() != 2 {
            return Err(syntax(s.pos(), "expected (:goal <formula>)"));
        }
        pb.goal = ctx.formula(&v[1], &[])?;
    }
    Ok(pb)
}

/// Parses a domain/problem pair.
pub fn parse_pddl(domain: &str, problem: &str) -> Result<PddlSpec, PddlError> {
    let domain = parse_domain(domain)?;
    let problem = parse_problem(problem, &domain)?;
    Ok(PddlSpec { domain, problem })
}

/// Parses a plan file: one `(name arg...)` per line, `;` comments.
pub fn parse_plan(text: &str, spec: &PddlSpec) -> Result<Vec<GroundAction>, PddlError> {
    let mut out = Vec::new();
    for sx in read_all(text)? {
        let v = list(&sx, "a ground action")?;
        let n = name(v.first().ok_or_else(|| syntax(sx.pos(), "empty action"))?, "an action name")?;
        let args: Vec<String> = v[1..].iter().map(|a| name(a, "a constant")).collect::<Result<_, _>>()?;
        out.push(spec.instantiate(&n, &args)?);
    }
    Ok(out)
}
