//! S-expression reader with source positions; `;` starts a comment.

use super::PddlError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Sx {
    List(Vec<Sx>, Pos),
    Sym(String, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Sx {
    pub fn pos(&self) -> Pos {
        match self {
            Sx::List(_, p) | Sx::Sym(_, p) => *p,
        }
    }

    pub fn sym(&self) -> Option<&str> {
        match self {
            Sx::Sym(s, _) => Some(s),
            Sx::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sx]> {
        match self {
            Sx::List(v, _) => Some(v),
            Sx::Sym(..) => None,
        }
    }

    /// The lowercased head symbol of a list.
    pub fn head(&self) -> Option<String> {
        self.list()?.first()?.sym().map(str::to_ascii_lowercase)
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax { line: pos.line, col: pos.col, message: message.into() }
}

pub(crate) fn invalid(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Invalid { line: pos.line, col: pos.col, message: message.into() }
}

pub(crate) fn unsupported(pos: Pos, feature: impl Into<String>) -> PddlError {
    PddlError::Unsupported { feature: feature.into(), line: pos.line, col: pos.col }
}

/// Reads exactly one top-level expression.
pub(crate) fn read(text: &str) -> Result<Sx, PddlError> {
    let mut stack: Vec<(Vec<Sx>, Pos)> = Vec::new();
    let mut top: Option<Sx> = None;
    let push = |stack: &mut Vec<(Vec<Sx>, Pos)>, top: &mut Option<Sx>, sx: Sx| -> Result<(), PddlError> {
        match stack.last_mut() {
            Some((v, _)) => v.push(sx),
            None if top.is_none() => *top = Some(sx),
            None => return Err(syntax(sx.pos(), "unexpected input after the top-level expression")),
        }
        Ok(())
    };
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: li + 1, col: i + 1 };
            if c.is_whitespace() {
                i += 1;
            } else if c == ';' {
                break;
            } else if c == '(' {
                stack.push((Vec::new(), pos));
                i += 1;
            } else if c == ')' {
                let (v, p) = stack.pop().ok_or_else(|| syntax(pos, "unbalanced `)`"))?;
                push(&mut stack, &mut top, Sx::List(v, p))?;
                i += 1;
            } else {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '(' | ')' | ';') {
                    i += 1;
                }
                push(&mut stack, &mut top, Sx::Sym(chars[start..i].iter().collect(), pos))?;
            }
        }
    }
    if let Some((_, p)) = stack.last() {
        return Err(syntax(*p, "unclosed `(`"));
    }
    top.ok_or_else(|| syntax(Pos { line: 1, col: 1 }, "empty input"))
}

/// Reads a sequence of top-level expressions (used for plan files).
pub(crate) fn read_all(text: &str) -> Result<Vec<Sx>, PddlError> {
    let mut wrapped = String::with_capacity(text.len() + 2);
    wrapped.push('(');
    wrapped.push_str(text);
    wrapped.push_str("\n)");
    match read(&wrapped)? {
        Sx::List(v, _) => Ok(v),
        Sx::Sym(..) => unreachable!(),
    }
}
