//! The line-oriented interface language:
//!
//! ```text
//! object <constant> -> <individual>
//! fluent <predicate> -> <concept-or-role>
//! fluent <predicate> -> not <role>
//! query <p>(<x>: <concept>, ...) <- { <assertion>; ... }
//! ```
//!
//! Assertions are either functional-syntax axioms or the short forms
//! `C(x)`, `r(x, y)` and `not r(x, y)`, where `C` may be a concept
//! expression. `#` starts a comment.

use crate::dl::{parse_axiom, parse_concept, Axiom, AxiomPattern, Concept, Signature};
use crate::pddl::PddlSpec;

use super::{FluentInterface, FluentTarget, OmpsError, QuerySpec};

const AXIOM_HEADS: &[&str] = &[
    "ClassAssertion",
    "ObjectPropertyAssertion",
    "NegativeObjectPropertyAssertion",
    "SameIndividual",
    "DifferentIndividuals",
];

fn err(line: usize, message: impl Into<String>) -> OmpsError {
    OmpsError::Interface { line, message: message.into() }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.'))
}

struct Names<'a> {
    sig: &'a Signature,
    line: usize,
}

impl Names<'_> {
    fn concept(&self, c: &Concept) -> Result<(), OmpsError> {
        let mut concept: Option<String> = None;
        let mut role: Option<String> = None;
        c.visit_names(
            &mut |n| {
                if !self.sig.concepts.contains(n) && concept.is_none() {
                    concept = Some(format!("unknown concept name `{n}`"));
                }
            },
            &mut |r| {
                if !self.sig.roles.contains(r) && role.is_none() {
                    role = Some(format!("unknown role name `{r}`"));
                }
            },
        );
        concept.or(role).map_or(Ok(()), |m| Err(err(self.line, m)))
    }

    fn axiom(&self, ax: &Axiom) -> Result<(), OmpsError> {
        match ax {
            Axiom::ClassAssertion(c, _) => self.concept(c),
            Axiom::RoleAssertion(r, ..) | Axiom::NegativeRoleAssertion(r, ..) if !self.sig.roles.contains(r) => {
                Err(err(self.line, format!("unknown role name `{r}`")))
            }
            _ => Ok(()),
        }
    }
}

fn parse_concept_text(text: &str, line: usize) -> Result<Concept, OmpsError> {
    match text.trim() {
        "Thing" | "Top" | "⊤" | "owl:Thing" => Ok(Concept::Top),
        t => parse_concept(t).map_err(|e| err(line, format!("concept `{t}`: {e}"))),
    }
}

fn parse_assertion(item: &str, names: &Names) -> Result<Axiom, OmpsError> {
    let line = names.line;
    let item = item.trim();
    if AXIOM_HEADS.iter().any(|h| item.starts_with(h) && item[h.len()..].trim_start().starts_with('(')) {
        let ax = parse_axiom(item).map_err(|e| err(line, e.to_string()))?;
        if !ax.is_abox() {
            return Err(err(line, format!("`{item}` is not an assertion")));
        }
        return Ok(ax);
    }
    let (negated, body) = match item.strip_prefix("not ") {
        Some(rest) => (true, rest.trim()),
        None => (false, item),
    };
    if !body.ends_with(')') {
        return Err(err(line, format!("expected an assertion, got `{item}`")));
    }
    let mut depth = 0i32;
    let mut open = None;
    for (i, c) in body.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' => {
                depth -= 1;
                if depth == 0 {
                    open = Some(i);
                    break;
                }
            }
            _ => {}
        }
    }
    let open = open.ok_or_else(|| err(line, format!("unbalanced parentheses in `{item}`")))?;
    let head = body[..open].trim();
    let args: Vec<String> = body[open + 1..body.len() - 1]
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    if args.iter().any(|a| !is_ident(a)) {
        return Err(err(line, format!("bad arguments in `{item}`")));
    }
    let ax = if names.sig.roles.contains(head) {
        if args.len() != 2 {
            return Err(err(line, format!("role `{head}` needs two arguments")));
        }
        if negated {
            Axiom::neg_role(head, args[0].clone(), args[1].clone())
        } else {
            Axiom::role(head, args[0].clone(), args[1].clone())
        }
    } else {
        if args.len() != 1 {
            return Err(err(line, format!("concept assertion `{item}` needs one argument")));
        }
        let c = parse_concept_text(head, line)?;
        let c = if negated { Concept::not(c) } else { c };
        Axiom::class(c, args[0].clone())
    };
    names.axiom(&ax)?;
    Ok(ax)
}

fn parse_query(rest: &str, names: &Names) -> Result<QuerySpec, OmpsError> {
    let line = names.line;
    let (lhs, rhs) = rest.split_once("<-").ok_or_else(|| err(line, "expected `<-` in query"))?;
    let lhs = lhs.trim();
    let open = lhs.find('(').ok_or_else(|| err(line, "expected `(` after the query predicate"))?;
    if !lhs.ends_with(')') {
        return Err(err(line, "expected `)` closing the query variables"));
    }
    let predicate = lhs[..open].trim().to_string();
    if !is_ident(&predicate) {
        return Err(err(line, format!("bad query predicate `{predicate}`")));
    }
    let mut vars = Vec::new();
    let mut types = Vec::new();
    let inner = &lhs[open + 1..lhs.len() - 1];
    if !inner.trim().is_empty() {
        for param in split_top(inner, ',') {
            let (v, t) = match param.split_once(':') {
                Some((v, t)) => (v.trim(), t.trim()),
                None => (param.trim(), "owl:Thing"),
            };
            if !is_ident(v) || vars.iter().any(|x| x == v) {
                return Err(err(line, format!("bad query variable `{v}`")));
            }
            let c = parse_concept_text(t, line)?;
            names.concept(&c)?;
            vars.push(v.to_string());
            types.push(c);
        }
    }
    let rhs = rhs.trim();
    let body = rhs
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| err(line, "expected `{ ... }` after `<-`"))?;
    let mut query = Vec::new();
    for item in split_top(body, ';') {
        if item.trim().is_empty() {
            continue;
        }
        let ax = parse_assertion(item, names)?;
        query.push(AxiomPattern::new(ax, vars.iter().cloned()));
    }
    Ok(QuerySpec { predicate, vars, types, query })
}

/// Parses an interface file against the planning specification and the
/// signature of the static ontology.
pub fn parse_interface(
    text: &str,
    spec: &PddlSpec,
    signature: &Signature,
) -> Result<(FluentInterface, Vec<QuerySpec>), OmpsError> {
    let consts = spec.constants();
    let mut f = FluentInterface::new();
    let mut queries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let names = Names { sig: signature, line };
        match kw {
            "object" => {
                let (c, ind) = rest.split_once("->").ok_or_else(|| err(line, "expected `->`"))?;
                let (c, ind) = (c.trim(), ind.trim());
                if !consts.iter().any(|x| x == c) {
                    return Err(err(line, format!("undeclared constant `{c}`")));
                }
                if !is_ident(ind) || signature.concepts.contains(ind) || signature.roles.contains(ind) {
                    return Err(err(line, format!("`{ind}` is not an individual name")));
                }
                f.map_object(c, ind).map_err(|m| err(line, m))?;
            }
            "fluent" => {
                let (p, target) = rest.split_once("->").ok_or_else(|| err(line, "expected `->`"))?;
                let p = p.trim();
                let decl = spec.domain.predicate(p).ok_or_else(|| err(line, format!("undeclared predicate `{p}`")))?;
                let target = target.trim();
                let (negated, name) = match target.strip_prefix("not ") {
                    Some(n) => (true, n.trim()),
                    None => (false, target),
                };
                let t = match decl.arity() {
                    1 if negated => return Err(err(line, "negated targets need a binary predicate")),
                    1 if signature.concepts.contains(name) => FluentTarget::Concept(name.to_string()),
                    1 => return Err(err(line, format!("unary predicate `{p}` needs a known concept name, got `{name}`"))),
                    2 if signature.roles.contains(name) => {
                        if negated {
                            FluentTarget::NegativeRole(name.to_string())
                        } else {
                            FluentTarget::Role(name.to_string())
                        }
                    }
                    2 => return Err(err(line, format!("binary predicate `{p}` needs a known role name, got `{name}`"))),
                    n => return Err(err(line, format!("predicate `{p}` has arity {n}; only unary and binary map"))),
                };
                f.map_predicate(p, t).map_err(|m| err(line, m))?;
            }
            "query" => queries.push(parse_query(rest, &names)?),
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok((f, queries))
}
