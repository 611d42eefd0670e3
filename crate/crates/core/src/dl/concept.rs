use std::fmt;

/// An ALCQ concept expression.
///
/// `And`/`Or` built through [`Concept::and`] and [`Concept::or`] are kept
/// flat and have at least two operands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Name(String),
    Not(Box<Concept>),
    And(Vec<Concept>),
    Or(Vec<Concept>),
    Exists(String, Box<Concept>),
    Forall(String, Box<Concept>),
    AtLeast(u32, String, Box<Concept>),
    AtMost(u32, String, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Concept {
        Concept::Name(n.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }

    /// Flattening conjunction. Empty input is `Top`, a single operand is returned as is.
    pub fn and(parts: impl IntoIterator<Item = Concept>) -> Concept {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Concept::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Concept::Top,
            1 => out.pop().unwrap(),
            _ => Concept::And(out),
        }
    }

    /// Flattening disjunction. Empty input is `Bottom`.
    pub fn or(parts: impl IntoIterator<Item = Concept>) -> Concept {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Concept::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Concept::Bottom,
            1 => out.pop().unwrap(),
            _ => Concept::Or(out),
        }
    }

    pub fn exists(role: impl Into<String>, c: Concept) -> Concept {
        Concept::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: Concept) -> Concept {
        Concept::Forall(role.into(), Box::new(c))
    }

    pub fn at_least(n: u32, role: impl Into<String>, c: Concept) -> Concept {
        Concept::AtLeast(n, role.into(), Box::new(c))
    }

    pub fn at_most(n: u32, role: impl Into<String>, c: Concept) -> Concept {
        Concept::AtMost(n, role.into(), Box::new(c))
    }

    /// `=n r.C`, expressed as `≥n r.C ⊓ ≤n r.C`.
    pub fn exactly(n: u32, role: impl Into<String>, c: Concept) -> Concept {
        let role = role.into();
        Concept::And(vec![
            Concept::at_least(n, role.clone(), c.clone()),
            Concept::at_most(n, role, c),
        ])
    }

    /// Negation normal form: negation only directly above concept names.
    pub fn nnf(&self) -> Concept {
        self.nnf_with(true)
    }

    fn nnf_with(&self, positive: bool) -> Concept {
        use Concept::*;
        match self {
            Top => {
                if positive {
                    Top
                } else {
                    Bottom
                }
            }
            Bottom => {
                if positive {
                    Bottom
                } else {
                    Top
                }
            }
            Name(n) => {
                if positive {
                    Name(n.clone())
                } else {
                    Concept::not(Name(n.clone()))
                }
            }
            Not(c) => c.nnf_with(!positive),
            And(cs) => {
                let parts = cs.iter().map(|c| c.nnf_with(positive));
                if positive {
                    Concept::and(parts)
                } else {
                    Concept::or(parts)
                }
            }
            Or(cs) => {
                let parts = cs.iter().map(|c| c.nnf_with(positive));
                if positive {
                    Concept::or(parts)
                } else {
                    Concept::and(parts)
                }
            }
            Exists(r, c) => {
                if positive {
                    Concept::exists(r.clone(), c.nnf())
                } else {
                    Concept::forall(r.clone(), c.nnf_with(false))
                }
            }
            Forall(r, c) => {
                if positive {
                    Concept::forall(r.clone(), c.nnf())
                } else {
                    Concept::exists(r.clone(), c.nnf_with(false))
                }
            }
            AtLeast(n, r, c) => match (positive, *n) {
                (true, 0) => Top,
                (true, n) => Concept::at_least(n, r.clone(), c.nnf()),
                (false, 0) => Bottom,
                (false, n) => Concept::at_most(n - 1, r.clone(), c.nnf()),
            },
            AtMost(n, r, c) => {
                if positive {
                    Concept::at_most(*n, r.clone(), c.nnf())
                } else {
                    Concept::at_least(n + 1, r.clone(), c.nnf())
                }
            }
        }
    }

    pub fn is_nnf(&self) -> bool {
        use Concept::*;
        match self {
            Top | Bottom | Name(_) => true,
            Not(c) => matches!(**c, Name(_)),
            And(cs) | Or(cs) => cs.iter().all(Concept::is_nnf),
            Exists(_, c) | Forall(_, c) | AtLeast(_, _, c) | AtMost(_, _, c) => c.is_nnf(),
        }
    }

    /// Calls `f` on every concept name and `g` on every role name, in syntactic order.
    pub fn visit_names(&self, f: &mut dyn FnMut(&str), g: &mut dyn FnMut(&str)) {
        use Concept::*;
        match self {
            Top | Bottom => {}
            Name(n) => f(n),
            Not(c) => c.visit_names(f, g),
            And(cs) | Or(cs) => {
                for c in cs {
                    c.visit_names(f, g);
                }
            }
            Exists(r, c) | Forall(r, c) | AtLeast(_, r, c) | AtMost(_, r, c) => {
                g(r);
                c.visit_names(f, g);
            }
        }
    }

    pub fn concept_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_names(&mut |n| out.push(n.to_string()), &mut |_| {});
        out
    }

    /// Modal depth (nesting of role restrictions).
    pub fn depth(&self) -> usize {
        use Concept::*;
        match self {
            Top | Bottom | Name(_) => 0,
            Not(c) => c.depth(),
            And(cs) | Or(cs) => cs.iter().map(Concept::depth).max().unwrap_or(0),
            Exists(_, c) | Forall(_, c) | AtLeast(_, _, c) | AtMost(_, _, c) => 1 + c.depth(),
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Concept::*;
        match self {
            Top => f.write_str("owl:Thing"),
            Bottom => f.write_str("owl:Nothing"),
            Name(n) => f.write_str(n),
            Not(c) => write!(f, "ObjectComplementOf({c})"),
            And(cs) => write_list(f, "ObjectIntersectionOf", cs),
            Or(cs) => write_list(f, "ObjectUnionOf", cs),
            Exists(r, c) => write!(f, "ObjectSomeValuesFrom({r} {c})"),
            Forall(r, c) => write!(f, "ObjectAllValuesFrom({r} {c})"),
            AtLeast(n, r, c) => write!(f, "ObjectMinCardinality({n} {r} {c})"),
            AtMost(n, r, c) => write!(f, "ObjectMaxCardinality({n} {r} {c})"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, head: &str, cs: &[Concept]) -> fmt::Result {
    write!(f, "{head}(")?;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str(")")
}
