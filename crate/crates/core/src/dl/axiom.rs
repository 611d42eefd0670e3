use std::fmt;

use super::{Concept, DlError};

/// A TBox or ABox axiom.
///
/// The symmetric forms (`SameIndividual`, `DifferentIndividuals`) are kept
/// with their arguments in sorted order when built through the constructors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    SubClassOf(Concept, Concept),
    EquivalentClasses(Concept, Concept),
    ClassAssertion(Concept, String),
    RoleAssertion(String, String, String),
    NegativeRoleAssertion(String, String, String),
    SameIndividual(String, String),
    DifferentIndividuals(String, String),
}

impl Axiom {
    pub fn sub(c: Concept, d: Concept) -> Axiom {
        Axiom::SubClassOf(c, d)
    }

    pub fn class(c: Concept, a: impl Into<String>) -> Axiom {
        Axiom::ClassAssertion(c, a.into())
    }

    pub fn role(r: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Axiom {
        Axiom::RoleAssertion(r.into(), a.into(), b.into())
    }

    pub fn neg_role(r: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Axiom {
        Axiom::NegativeRoleAssertion(r.into(), a.into(), b.into())
    }

    pub fn same(a: impl Into<String>, b: impl Into<String>) -> Axiom {
        let (a, b) = ordered(a.into(), b.into());
        Axiom::SameIndividual(a, b)
    }

    pub fn different(a: impl Into<String>, b: impl Into<String>) -> Axiom {
        let (a, b) = ordered(a.into(), b.into());
        Axiom::DifferentIndividuals(a, b)
    }

    /// The contradictory axiom `⊤ ⊑ ⊥`.
    pub fn falsum() -> Axiom {
        Axiom::SubClassOf(Concept::Top, Concept::Bottom)
    }

    pub fn is_abox(&self) -> bool {
        !matches!(self, Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..))
    }

    pub fn is_tbox(&self) -> bool {
        !self.is_abox()
    }

    /// Individual names in argument order.
    pub fn individuals(&self) -> Vec<&str> {
        match self {
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..) => Vec::new(),
            Axiom::ClassAssertion(_, a) => vec![a],
            Axiom::RoleAssertion(_, a, b)
            | Axiom::NegativeRoleAssertion(_, a, b)
            | Axiom::SameIndividual(a, b)
            | Axiom::DifferentIndividuals(a, b) => vec![a, b],
        }
    }

    /// Concept names occurring anywhere in the axiom.
    pub fn concept_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_names(&mut |n| out.push(n.to_string()), &mut |_| {});
        out
    }

    pub fn role_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_names(&mut |_| {}, &mut |r| out.push(r.to_string()));
        out
    }

    pub fn visit_names(&self, f: &mut dyn FnMut(&str), g: &mut dyn FnMut(&str)) {
        match self {
            Axiom::SubClassOf(c, d) | Axiom::EquivalentClasses(c, d) => {
                c.visit_names(f, g);
                d.visit_names(f, g);
            }
            Axiom::ClassAssertion(c, _) => c.visit_names(f, g),
            Axiom::RoleAssertion(r, ..) | Axiom::NegativeRoleAssertion(r, ..) => g(r),
            Axiom::SameIndividual(..) | Axiom::DifferentIndividuals(..) => {}
        }
    }

    /// Renames individuals. Symmetric forms are re-normalised.
    pub fn map_individuals(&self, f: impl Fn(&str) -> String) -> Axiom {
        match self {
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..) => self.clone(),
            Axiom::ClassAssertion(c, a) => Axiom::ClassAssertion(c.clone(), f(a)),
            Axiom::RoleAssertion(r, a, b) => Axiom::RoleAssertion(r.clone(), f(a), f(b)),
            Axiom::NegativeRoleAssertion(r, a, b) => {
                Axiom::NegativeRoleAssertion(r.clone(), f(a), f(b))
            }
            Axiom::SameIndividual(a, b) => Axiom::same(f(a), f(b)),
            Axiom::DifferentIndividuals(a, b) => Axiom::different(f(a), f(b)),
        }
    }

    /// Logical complement of an ABox axiom, again in ABox form.
    pub fn negate_assertion(&self) -> Result<Axiom, DlError> {
        Ok(match self {
            Axiom::ClassAssertion(Concept::Not(c), a) => Axiom::ClassAssertion((**c).clone(), a.clone()),
            Axiom::ClassAssertion(c, a) => Axiom::ClassAssertion(Concept::not(c.clone()), a.clone()),
            Axiom::RoleAssertion(r, a, b) => Axiom::NegativeRoleAssertion(r.clone(), a.clone(), b.clone()),
            Axiom::NegativeRoleAssertion(r, a, b) => Axiom::RoleAssertion(r.clone(), a.clone(), b.clone()),
            Axiom::SameIndividual(a, b) => Axiom::different(a.clone(), b.clone()),
            Axiom::DifferentIndividuals(a, b) => Axiom::same(a.clone(), b.clone()),
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..) => {
                return Err(DlError::NotAnAssertion(self.to_string()))
            }
        })
    }

    /// The equivalent concept assertion. ALCQ has no nominals, so only
    /// concept assertions themselves qualify.
    pub fn as_concept_assertion(&self) -> Result<Axiom, DlError> {
        match self {
            Axiom::ClassAssertion(..) => Ok(self.clone()),
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..) => {
                Err(DlError::NotAnAssertion(self.to_string()))
            }
            _ => Err(DlError::RequiresConceptAssertion(self.to_string())),
        }
    }
}

fn ordered(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::SubClassOf(c, d) => write!(f, "SubClassOf({c} {d})"),
            Axiom::EquivalentClasses(c, d) => write!(f, "EquivalentClasses({c} {d})"),
            Axiom::ClassAssertion(c, a) => write!(f, "ClassAssertion({c} {a})"),
            Axiom::RoleAssertion(r, a, b) => write!(f, "ObjectPropertyAssertion({r} {a} {b})"),
            Axiom::NegativeRoleAssertion(r, a, b) => {
                write!(f, "NegativeObjectPropertyAssertion({r} {a} {b})")
            }
            Axiom::SameIndividual(a, b) => write!(f, "SameIndividual({a} {b})"),
            Axiom::DifferentIndividuals(a, b) => write!(f, "DifferentIndividuals({a} {b})"),
        }
    }
}
