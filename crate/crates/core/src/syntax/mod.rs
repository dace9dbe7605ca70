//! Concrete syntax for coroutine types and programs.
//!
//! ```text
//! program   := (line NEWLINE)*        line := decl | COMMENT | EMPTY
//! decl      := [IDENT ['*'] ':'] type
//! type      := coroutine | seq | tuple | list | atom
//! coroutine := [IDENT ['*'] ':'] '<' type ';' type '>'
//! seq       := '[' type (',' type)* ']'
//! tuple     := '(' type (',' type)+ ')'
//! list      := (atom | tuple) '^' (length | '*')
//! length    := NAT | LIDENT | 'dec' '(' length ')' | 'min' '(' length ',' length ')'
//! atom      := UIDENT | LIDENT | '@' IDENT | 'void'
//! ```
//!
//! Uppercase identifiers are concrete types, lowercase ones are variables.
//! `#` starts a comment that runs to the end of the line.

pub(crate) mod parse;
pub mod print;

use std::collections::BTreeMap;
use std::fmt;

use crate::types::{Coroutine, Type};

pub use print::{fresh_name, print_type};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { label: String, line: usize },
    #[error("line {line}: reference `@{label}` does not name a labeled coroutine")]
    UnresolvedRef { label: String, line: usize },
    #[error("line {line}: a declaration must be a coroutine or a reference to one")]
    NotACoroutine { line: usize },
    #[error("line {line}: references starting at `@{label}` never reach a coroutine")]
    CyclicRef { label: String, line: usize },
}

/// Parses a single type expression and normalizes it.
pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = parse::Parser::new(text, 1, 1);
    let t = p.ty()?;
    p.finish()?;
    Ok(t.normalize())
}

/// One line of a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub label: Option<String>,
    pub starred: bool,
    /// A coroutine (without the declaration's label) or a reference.
    pub ty: Type,
    pub line: usize,
}

/// An ordered list of coroutine declarations; order is activation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn from_coroutines(coroutines: impl IntoIterator<Item = Coroutine>) -> Self {
        let decls = coroutines
            .into_iter()
            .enumerate()
            .map(|(i, c)| Decl {
                label: c.label.clone(),
                starred: c.starred,
                ty: Coroutine::new(c.recv, c.yld).into_type(),
                line: i + 1,
            })
            .collect();
        Program { decls }
    }

    /// Every labeled coroutine in the program, declared or nested, in the
    /// form it was written. Declarations that are references are resolved.
    pub fn labels(&self) -> Result<BTreeMap<String, Coroutine>, SyntaxError> {
        let mut table: BTreeMap<String, Coroutine> = BTreeMap::new();
        let mut pending_refs = Vec::new();
        let mut lines = BTreeMap::new();
        let mut claim = |label: &str, line: usize| -> Result<(), SyntaxError> {
            if lines.insert(label.to_string(), line).is_some() {
                Err(SyntaxError::DuplicateLabel {
                    label: label.to_string(),
                    line,
                })
            } else {
                Ok(())
            }
        };
        for decl in &self.decls {
            if let Some(label) = &decl.label {
                claim(label, decl.line)?;
                match &decl.ty {
                    Type::Coroutine(c) => {
                        table.insert(
                            label.clone(),
                            Coroutine {
                                label: Some(label.clone()),
                                starred: decl.starred,
                                ..(**c).clone()
                            },
                        );
                    }
                    Type::Ref(target) => pending_refs.push((decl, target.clone())),
                    _ => return Err(SyntaxError::NotACoroutine { line: decl.line }),
                }
            }
            let mut nested = Vec::new();
            decl.ty.visit(&mut |t| {
                if let Type::Coroutine(c) = t {
                    if c.label.is_some() {
                        nested.push((**c).clone());
                    }
                }
            });
            for c in nested {
                let label = c.label.clone().unwrap_or_default();
                claim(&label, decl.line)?;
                table.insert(label, c);
            }
        }
        // Declarations of the form `b: @a` take a's body under their own label.
        let mut remaining = pending_refs;
        while !remaining.is_empty() {
            let before = remaining.len();
            let mut still = Vec::new();
            for (decl, target) in remaining {
                match table.get(&target) {
                    Some(body) => {
                        let label = decl.label.clone().unwrap_or_default();
                        let c = Coroutine {
                            label: Some(label.clone()),
                            starred: decl.starred,
                            ..body.clone()
                        };
                        table.insert(label, c);
                    }
                    None => still.push((decl, target)),
                }
            }
            if still.len() == before {
                let (decl, target) = &still[0];
                let declared = self.decls.iter().any(|d| d.label.as_deref() == Some(target));
                return Err(if declared {
                    SyntaxError::CyclicRef {
                        label: target.clone(),
                        line: decl.line,
                    }
                } else {
                    SyntaxError::UnresolvedRef {
                        label: target.clone(),
                        line: decl.line,
                    }
                });
            }
            remaining = still;
        }
        Ok(table)
    }

    /// Checks labels and references, returning the label table.
    pub fn validate(&self) -> Result<BTreeMap<String, Coroutine>, SyntaxError> {
        let table = self.labels()?;
        for decl in &self.decls {
            match &decl.ty {
                Type::Coroutine(_) => {}
                Type::Ref(_) if decl.label.is_some() => {}
                Type::Ref(target) => {
                    if !table.contains_key(target) {
                        return Err(SyntaxError::UnresolvedRef {
                            label: target.clone(),
                            line: decl.line,
                        });
                    }
                }
                _ => return Err(SyntaxError::NotACoroutine { line: decl.line }),
            }
            let mut missing = None;
            decl.ty.visit(&mut |t| {
                if let Type::Ref(label) = t {
                    if missing.is_none() && !table.contains_key(label) {
                        missing = Some(label.clone());
                    }
                }
            });
            if let Some(label) = missing {
                return Err(SyntaxError::UnresolvedRef {
                    label,
                    line: decl.line,
                });
            }
        }
        Ok(table)
    }

    /// The declared coroutines in activation order, references resolved.
    pub fn coroutines(&self) -> Result<Vec<Coroutine>, SyntaxError> {
        let table = self.validate()?;
        self.decls
            .iter()
            .map(|decl| match &decl.ty {
                Type::Coroutine(c) => Ok(Coroutine {
                    label: decl.label.clone(),
                    starred: decl.starred,
                    ..(**c).clone()
                }),
                Type::Ref(target) => {
                    let body = &table[decl.label.as_ref().unwrap_or(target)];
                    Ok(Coroutine {
                        label: decl.label.clone().or_else(|| body.label.clone()),
                        starred: decl.starred || (decl.label.is_none() && body.starred),
                        ..body.clone()
                    })
                }
                _ => Err(SyntaxError::NotACoroutine { line: decl.line }),
            })
            .collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for decl in &self.decls {
            if let Some(label) = &decl.label {
                write!(f, "{label}{}: ", if decl.starred { "*" } else { "" })?;
            }
            writeln!(f, "{}", decl.ty)?;
        }
        Ok(())
    }
}

/// Parses a program: one declaration per line, `#` comments, blank lines
/// ignored. Labels and references are validated.
pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    let mut decls = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let code = raw.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        let mut p = parse::Parser::new(code, line, 1);
        if p.at_end() {
            continue;
        }
        if code.trim_start().starts_with('*') {
            return Err(ParseError {
                line,
                column: code.len() - code.trim_start().len() + 1,
                message: "`*` marks a labeled coroutine; add a label before it".into(),
            }
            .into());
        }
        let prefix = p.label_prefix();
        let ty = p.ty()?.normalize();
        p.finish()?;
        let (label, starred, ty) = match (prefix, ty) {
            (Some(prefix), Type::Coroutine(c)) if c.label.is_some() => {
                return Err(ParseError {
                    line,
                    column: 1,
                    message: format!("coroutine declared as `{}` carries a second label", prefix.label),
                }
                .into());
            }
            (Some(prefix), ty) => (Some(prefix.label), prefix.starred, ty),
            (None, Type::Coroutine(c)) => {
                let Coroutine {
                    recv,
                    yld,
                    label,
                    starred,
                } = *c;
                (label, starred, Coroutine::new(recv, yld).into_type())
            }
            (None, ty) => (None, false, ty),
        };
        match ty {
            Type::Coroutine(_) | Type::Ref(_) => {}
            _ => return Err(SyntaxError::NotACoroutine { line }),
        }
        decls.push(Decl {
            label,
            starred,
            ty,
            line,
        });
    }
    let program = Program { decls };
    program.validate()?;
    Ok(program)
}
