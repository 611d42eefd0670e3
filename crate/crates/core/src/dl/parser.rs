//! Reader for the functional-style ontology syntax.
//!
//! One axiom per line is the conventional layout, but the reader is
//! token based, so axioms may span lines. `#` at the start of a token
//! comments out the rest of the line.

use std::collections::HashMap;

use super::{Axiom, Concept, DlError, NameKind, Ontology};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                break;
            } else if c == '(' || c == ')' {
                out.push(Token {
                    tok: if c == '(' { Tok::Open } else { Tok::Close },
                    line: li + 1,
                    col: i + 1,
                });
                i += 1;
            } else {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Atom(chars[start..i].iter().collect()),
                    line: li + 1,
                    col: start + 1,
                });
            }
        }
    }
    out
}

const AXIOM_HEADS: &[&str] = &[
    "SubClassOf",
    "EquivalentClasses",
    "ClassAssertion",
    "ObjectPropertyAssertion",
    "NegativeObjectPropertyAssertion",
    "SameIndividual",
    "DifferentIndividuals",
];

const CONCEPT_HEADS: &[&str] = &[
    "ObjectComplementOf",
    "ObjectIntersectionOf",
    "ObjectUnionOf",
    "ObjectSomeValuesFrom",
    "ObjectAllValuesFrom",
    "ObjectMinCardinality",
    "ObjectMaxCardinality",
    "ObjectExactCardinality",
];

pub(crate) struct Reader {
    toks: Vec<Token>,
    pos: usize,
    kinds: HashMap<String, NameKind>,
    end: (usize, usize),
}

impl Reader {
    pub(crate) fn new(text: &str) -> Self {
        let toks = tokenize(text);
        let lines = text.lines().count().max(1);
        let last_len = text.lines().last().map(|l| l.chars().count()).unwrap_or(0);
        Reader { toks, pos: 0, kinds: HashMap::new(), end: (lines, last_len + 1) }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn syntax(&self, msg: impl Into<String>) -> DlError {
        let (line, col) = self.here();
        DlError::Syntax { line, col, message: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_is_open(&self, offset: usize) -> bool {
        matches!(self.toks.get(self.pos + offset).map(|t| &t.tok), Some(Tok::Open))
    }

    fn expect_open(&mut self) -> Result<(), DlError> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax("expected `(`")),
        }
    }

    fn expect_close(&mut self) -> Result<(), DlError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::Atom(a)) => Err(self.syntax(format!("expected `)`, found `{a}`"))),
            Some(Tok::Open) => Err(self.syntax("expected `)`, found `(`")),
            None => Err(self.syntax("expected `)`, found end of input")),
        }
    }

    fn atom(&mut self, what: &str) -> Result<String, DlError> {
        match self.peek() {
            Some(Tok::Atom(a)) => {
                let a = a.clone();
                self.pos += 1;
                Ok(a)
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn unsupported(&self, construct: &str) -> DlError {
        let (line, col) = self.here();
        DlError::Unsupported { construct: construct.to_string(), line, col }
    }

    fn name(&mut self, kind: NameKind) -> Result<String, DlError> {
        if let Some(Tok::Atom(a)) = self.peek() {
            if self.peek_is_open(1) {
                return Err(self.unsupported(&a.clone()));
            }
        }
        let (line, col) = self.here();
        let n = self.atom(kind.describe())?;
        if AXIOM_HEADS.contains(&n.as_str()) || CONCEPT_HEADS.contains(&n.as_str()) {
            return Err(DlError::Syntax { line, col, message: format!("keyword `{n}` used as a name") });
        }
        if n.starts_with('?') || n.parse::<i64>().is_ok() {
            return Err(DlError::Syntax { line, col, message: format!("invalid name `{n}`") });
        }
        if n == "owl:Thing" || n == "owl:Nothing" {
            if kind != NameKind::Concept {
                return Err(DlError::NameCategory { name: n, first: NameKind::Concept, second: kind });
            }
            return Ok(n);
        }
        match self.kinds.get(&n) {
            Some(&k) if k != kind => Err(DlError::NameCategory { name: n, first: k, second: kind }),
            Some(_) => Ok(n),
            None => {
                self.kinds.insert(n.clone(), kind);
                Ok(n)
            }
        }
    }

    fn number(&mut self) -> Result<u32, DlError> {
        let (line, col) = self.here();
        let a = self.atom("a non-negative integer")?;
        a.parse::<u32>().map_err(|_| DlError::Syntax {
            line,
            col,
            message: format!("expected a non-negative integer, found `{a}`"),
        })
    }

    pub(crate) fn concept(&mut self) -> Result<Concept, DlError> {
        let head = match self.peek() {
            Some(Tok::Atom(a)) => a.clone(),
            _ => return Err(self.syntax("expected a concept")),
        };
        if !self.peek_is_open(1) {
            let n = self.name(NameKind::Concept)?;
            return Ok(match n.as_str() {
                "owl:Thing" => Concept::Top,
                "owl:Nothing" => Concept::Bottom,
                _ => Concept::Name(n),
            });
        }
        if !CONCEPT_HEADS.contains(&head.as_str()) {
            return Err(self.unsupported(&head));
        }
        self.pos += 1;
        self.expect_open()?;
        let c = match head.as_str() {
            "ObjectComplementOf" => Concept::not(self.concept()?),
            "ObjectIntersectionOf" | "ObjectUnionOf" => {
                let mut parts = Vec::new();
                while !matches!(self.peek(), Some(Tok::Close) | None) {
                    parts.push(self.concept()?);
                }
                if parts.len() < 2 {
                    return Err(self.syntax(format!("`{head}` needs at least two operands")));
                }
                if head == "ObjectIntersectionOf" {
                    Concept::and(parts)
                } else {
                    Concept::or(parts)
                }
            }
            "ObjectSomeValuesFrom" | "ObjectAllValuesFrom" => {
                let r = self.name(NameKind::Role)?;
                let c = self.concept()?;
                if head == "ObjectSomeValuesFrom" {
                    Concept::exists(r, c)
                } else {
                    Concept::forall(r, c)
                }
            }
            _ => {
                let n = self.number()?;
                let r = self.name(NameKind::Role)?;
                let c = if matches!(self.peek(), Some(Tok::Close)) { Concept::Top } else { self.concept()? };
                match head.as_str() {
                    "ObjectMinCardinality" => Concept::at_least(n, r, c),
                    "ObjectMaxCardinality" => Concept::at_most(n, r, c),
                    _ => Concept::exactly(n, r, c),
                }
            }
        };
        self.expect_close()?;
        Ok(c)
    }

    fn individual(&mut self) -> Result<String, DlError> {
        self.name(NameKind::Individual)
    }

    /// One axiom construct; n-ary forms expand to several binary axioms.
    pub(crate) fn axiom(&mut self) -> Result<Vec<Axiom>, DlError> {
        let head = match self.peek() {
            Some(Tok::Atom(a)) => a.clone(),
            Some(Tok::Open) => return Err(self.syntax("expected an axiom, found `(`")),
            Some(Tok::Close) => return Err(self.syntax("unbalanced `)`")),
            None => return Err(self.syntax("expected an axiom")),
        };
        if !AXIOM_HEADS.contains(&head.as_str()) {
            if self.peek_is_open(1) {
                return Err(self.unsupported(&head));
            }
            return Err(self.syntax(format!("expected an axiom, found `{head}`")));
        }
        self.pos += 1;
        self.expect_open()?;
        let out = match head.as_str() {
            "SubClassOf" => {
                let c = self.concept()?;
                let d = self.concept()?;
                vec![Axiom::SubClassOf(c, d)]
            }
            "EquivalentClasses" => {
                let mut cs = vec![self.concept()?, self.concept()?];
                while !matches!(self.peek(), Some(Tok::Close) | None) {
                    cs.push(self.concept()?);
                }
                cs.windows(2).map(|w| Axiom::EquivalentClasses(w[0].clone(), w[1].clone())).collect()
            }
            "ClassAssertion" => {
                let c = self.concept()?;
                let a = self.individual()?;
                vec![Axiom::ClassAssertion(c, a)]
            }
            "ObjectPropertyAssertion" | "NegativeObjectPropertyAssertion" => {
                let r = self.name(NameKind::Role)?;
                let a = self.individual()?;
                let b = self.individual()?;
                if head == "ObjectPropertyAssertion" {
                    vec![Axiom::RoleAssertion(r, a, b)]
                } else {
                    vec![Axiom::NegativeRoleAssertion(r, a, b)]
                }
            }
            _ => {
                let mut inds = vec![self.individual()?, self.individual()?];
                while !matches!(self.peek(), Some(Tok::Close) | None) {
                    inds.push(self.individual()?);
                }
                if head == "SameIndividual" {
                    inds.windows(2).map(|w| Axiom::same(w[0].clone(), w[1].clone())).collect()
                } else {
                    let mut v = Vec::new();
                    for i in 0..inds.len() {
                        for j in i + 1..inds.len() {
                            v.push(Axiom::different(inds[i].clone(), inds[j].clone()));
                        }
                    }
                    v
                }
            }
        };
        self.expect_close()?;
        Ok(out)
    }

    pub(crate) fn finish(&self) -> Result<(), DlError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.syntax("unexpected trailing input"))
        }
    }
}

/// Parses a functional-syntax document.
pub fn parse_ontology(text: &str) -> Result<Ontology, DlError> {
    let mut r = Reader::new(text);
    let mut o = Ontology::new();
    while !r.at_end() {
        for ax in r.axiom()? {
            o.insert(ax);
        }
    }
    Ok(o)
}

/// Parses a single concept expression.
pub fn parse_concept(text: &str) -> Result<Concept, DlError> {
    let mut r = Reader::new(text);
    let c = r.concept()?;
    r.finish()?;
    Ok(c)
}

/// Parses a single axiom construct (which must not expand to several axioms).
pub fn parse_axiom(text: &str) -> Result<Axiom, DlError> {
    let mut r = Reader::new(text);
    let mut v = r.axiom()?;
    r.finish()?;
    if v.len() != 1 {
        return Err(DlError::Syntax { line: 1, col: 1, message: "expected exactly one axiom".into() });
    }
    Ok(v.pop().unwrap())
}

/// Prints an ontology, one axiom per line in insertion order.
pub fn print_ontology(o: &Ontology) -> String {
    let mut s = String::new();
    for ax in o {
        s.push_str(&ax.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Concept {
        Concept::name(s)
    }

    #[test]
    fn pr2_capacity_axiom() {
        let ax = parse_axiom("SubClassOf(PR2 ObjectIntersectionOf(Robot ObjectMaxCardinality(2 holds Block)))").unwrap();
        assert_eq!(ax, Axiom::sub(n("PR2"), Concept::and([n("Robot"), Concept::at_most(2, "holds", n("Block"))])));
    }

    #[test]
    fn top_assertion() {
        assert_eq!(parse_axiom("ClassAssertion(owl:Thing a)").unwrap(), Axiom::class(Concept::Top, "a"));
    }

    #[test]
    fn exact_cardinality_is_sugar() {
        let ax = parse_axiom(
            "SubClassOf(ObjectIntersectionOf(PR2 ObjectExactCardinality(2 holds Block)) FullHands)",
        )
        .unwrap();
        let lhs = Concept::And(vec![
            n("PR2"),
            Concept::at_least(2, "holds", n("Block")),
            Concept::at_most(2, "holds", n("Block")),
        ]);
        assert_eq!(ax, Axiom::sub(lhs, n("FullHands")));
    }

    #[test]
    fn unsupported_inverse_role() {
        let err = parse_ontology("SubClassOf(A ObjectSomeValuesFrom(ObjectInverseOf(r) B))").unwrap_err();
        match err {
            DlError::Unsupported { construct, line, col } => {
                assert_eq!(construct, "ObjectInverseOf");
                assert_eq!((line, col), (1, 35));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_ontology("# header\nClassAssertion(A a\n").unwrap_err();
        match err {
            DlError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn name_categories_are_disjoint() {
        let err = parse_ontology("ClassAssertion(A a)\nObjectPropertyAssertion(A a b)").unwrap_err();
        assert!(matches!(err, DlError::NameCategory { .. }), "{err:?}");
        let err = parse_ontology("ClassAssertion(A a)\nClassAssertion(a b)").unwrap_err();
        assert!(matches!(err, DlError::NameCategory { .. }), "{err:?}");
    }

    #[test]
    fn nary_forms_expand() {
        let o = parse_ontology("DifferentIndividuals(a b c)\nSameIndividual(x y z)").unwrap();
        assert_eq!(o.len(), 5);
        assert!(o.contains(&Axiom::different("c", "a")));
        assert!(o.contains(&Axiom::same("y", "z")));
    }

    #[test]
    fn comments_and_blank_lines() {
        let o = parse_ontology("# comment\n\nClassAssertion(A a) # trailing\n").unwrap();
        assert_eq!(o.len(), 1);
    }

    #[test]
    fn empty_round_trip() {
        let o = Ontology::new();
        assert_eq!(print_ontology(&o), "");
        assert_eq!(parse_ontology("").unwrap(), o);
    }

    #[test]
    fn cardinality_without_filler() {
        let c = parse_concept("ObjectMinCardinality(1 r)").unwrap();
        assert_eq!(c, Concept::at_least(1, "r", Concept::Top));
    }
}
