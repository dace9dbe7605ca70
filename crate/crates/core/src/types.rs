//! The coroutine type language.
//!
//! A [`Type`] is built from concrete types, type variables, flat sequences,
//! tuples, sized or unbounded lists, coroutines and references to labeled
//! coroutines. List lengths are symbolic naturals ([`Length`]).
//!
//! Sequences are associative and have `Void` as identity; [`Type::normalize`]
//! puts a type into the canonical flat form every other operation expects.

use std::fmt;

/// Separator between a variable's base name and its instance suffix.
pub const SUFFIX_MARK: char = '#';

/// A symbolic natural number used as a list length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Length {
    Lit(u64),
    Var(String),
    /// A symbol minted when an unbounded list is bound to a length variable.
    Fresh(u32),
    Dec(Box<Length>),
    Min(Box<Length>, Box<Length>),
    /// Indefinite length. Only valid directly under [`Type::List`].
    Star,
}

/// Raised when a length expression asks for the predecessor of zero.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot evaluate `{expr}`: dec of zero")]
pub struct EvalError {
    pub expr: String,
}

impl Length {
    pub fn var(name: impl Into<String>) -> Self {
        Length::Var(name.into())
    }

    pub fn dec(inner: Length) -> Self {
        Length::Dec(Box::new(inner))
    }

    pub fn min(a: Length, b: Length) -> Self {
        Length::Min(Box::new(a), Box::new(b))
    }

    /// Reduces every ground `dec` and `min`; symbolic forms are left intact.
    pub fn eval(&self) -> Result<Length, EvalError> {
        Ok(match self {
            Length::Dec(inner) => match inner.eval()? {
                Length::Lit(0) => {
                    return Err(EvalError {
                        expr: self.to_string(),
                    })
                }
                Length::Lit(n) => Length::Lit(n - 1),
                other => Length::dec(other),
            },
            Length::Min(a, b) => match (a.eval()?, b.eval()?) {
                (Length::Lit(a), Length::Lit(b)) => Length::Lit(a.min(b)),
                (a, b) => Length::min(a, b),
            },
            other => other.clone(),
        })
    }

    /// Like [`Length::eval`], but a `dec` of zero is kept as written.
    pub fn eval_lenient(&self) -> Length {
        match self {
            Length::Dec(inner) => match inner.eval_lenient() {
                Length::Lit(n) if n > 0 => Length::Lit(n - 1),
                other => Length::dec(other),
            },
            Length::Min(a, b) => match (a.eval_lenient(), b.eval_lenient()) {
                (Length::Lit(a), Length::Lit(b)) => Length::Lit(a.min(b)),
                (a, b) => Length::min(a, b),
            },
            other => other.clone(),
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Length::Var(_) => true,
            Length::Dec(inner) => inner.has_vars(),
            Length::Min(a, b) => a.has_vars() || b.has_vars(),
            Length::Lit(_) | Length::Fresh(_) | Length::Star => false,
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> Length) -> Length {
        match self {
            Length::Var(name) => f(name),
            Length::Dec(inner) => Length::dec(inner.map_vars(f)),
            Length::Min(a, b) => Length::min(a.map_vars(f), b.map_vars(f)),
            other => other.clone(),
        }
    }

    pub(crate) fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Length::Var(name) => out.push(name),
            Length::Dec(inner) => inner.collect_vars(out),
            Length::Min(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }
}

/// A coroutine type `<recv ; yld>`, optionally labeled and starred.
///
/// A starred coroutine restores its original form whenever it runs out of
/// both parts, so it always carries a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coroutine {
    pub recv: Type,
    pub yld: Type,
    pub label: Option<String>,
    pub starred: bool,
}

impl Coroutine {
    pub fn new(recv: Type, yld: Type) -> Self {
        Coroutine {
            recv,
            yld,
            label: None,
            starred: false,
        }
    }

    pub fn labeled(label: impl Into<String>, recv: Type, yld: Type) -> Self {
        Coroutine {
            recv,
            yld,
            label: Some(label.into()),
            starred: false,
        }
    }

    pub fn starred(label: impl Into<String>, recv: Type, yld: Type) -> Self {
        Coroutine {
            starred: true,
            ..Coroutine::labeled(label, recv, yld)
        }
    }

    /// Both parts exhausted: `<void ; void>`.
    pub fn is_spent(&self) -> bool {
        self.recv.is_void() && self.yld.is_void()
    }

    pub fn complexity(&self) -> usize {
        self.recv.complexity() + self.yld.complexity() + 1
    }

    pub fn into_type(self) -> Type {
        Type::Coroutine(Box::new(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    /// The empty type; identity of sequences.
    Void,
    Concrete(String),
    Var(String),
    /// Flat sequence, at least two items once normalized.
    Seq(Vec<Type>),
    /// Product type. Never flattened.
    Tuple(Vec<Type>),
    List(Box<Type>, Length),
    Coroutine(Box<Coroutine>),
    /// Reference to a labeled coroutine.
    Ref(String),
}

impl Type {
    pub fn concrete(name: impl Into<String>) -> Self {
        Type::Concrete(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Type::Var(name.into())
    }

    pub fn reference(label: impl Into<String>) -> Self {
        Type::Ref(label.into())
    }

    pub fn list(elem: Type, len: Length) -> Self {
        Type::List(Box::new(elem), len)
    }

    pub fn coroutine(recv: Type, yld: Type) -> Self {
        Coroutine::new(recv, yld).into_type()
    }

    pub fn is_void(&self) -> bool {
        matches!(self, Type::Void)
    }

    pub fn as_coroutine(&self) -> Option<&Coroutine> {
        match self {
            Type::Coroutine(c) => Some(c),
            _ => None,
        }
    }

    /// Canonical form: sequences flattened with `Void` removed, singleton
    /// sequences unwrapped, zero-length and void-element lists replaced by
    /// `Void`, ground length arithmetic reduced.
    pub fn normalize(&self) -> Type {
        match self {
            Type::Seq(items) => {
                let mut flat = Vec::with_capacity(items.len());
                for item in items {
                    match item.normalize() {
                        Type::Void => {}
                        Type::Seq(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => Type::Void,
                    1 => flat.pop().unwrap(),
                    _ => Type::Seq(flat),
                }
            }
            Type::Tuple(items) => Type::Tuple(items.iter().map(Type::normalize).collect()),
            Type::List(elem, len) => {
                let elem = elem.normalize();
                let len = len.eval_lenient();
                if elem.is_void() || len == Length::Lit(0) {
                    Type::Void
                } else {
                    Type::List(Box::new(elem), len)
                }
            }
            Type::Coroutine(c) => Coroutine {
                recv: c.recv.normalize(),
                yld: c.yld.normalize(),
                label: c.label.clone(),
                starred: c.starred,
            }
            .into_type(),
            other => other.clone(),
        }
    }

    /// The first atomic unit of a normalized type. Tuples, lists, variables
    /// and references are atomic. `None` for `Void`.
    pub fn head(&self) -> Option<&Type> {
        match self {
            Type::Void => None,
            Type::Seq(items) => items.first().and_then(Type::head),
            other => Some(other),
        }
    }

    /// Everything after [`Type::head`]; `None` for `Void`.
    pub fn tail(&self) -> Option<Type> {
        match self {
            Type::Void => None,
            Type::Seq(items) => {
                let (first, rest) = items.split_first()?;
                let mut out = Vec::with_capacity(items.len());
                out.push(first.tail()?);
                out.extend(rest.iter().cloned());
                Some(Type::Seq(out).normalize())
            }
            _ => Some(Type::Void),
        }
    }

    /// Type complexity: the number of atomic type occurrences plus one per
    /// coroutine node. Lists count their element once plus one, whatever
    /// their length.
    pub fn complexity(&self) -> usize {
        match self {
            Type::Void => 0,
            Type::Concrete(_) | Type::Var(_) | Type::Ref(_) => 1,
            Type::Seq(items) | Type::Tuple(items) => items.iter().map(Type::complexity).sum(),
            Type::List(elem, _) => elem.complexity() + 1,
            Type::Coroutine(c) => c.complexity(),
        }
    }

    /// Replaces the instance suffix of every type and length variable with
    /// `suffix` (which should start with [`SUFFIX_MARK`]; empty strips it).
    pub fn rename(&self, suffix: &str) -> Type {
        let rebase = |name: &str| -> String {
            let base = name.split(SUFFIX_MARK).next().unwrap_or(name);
            format!("{base}{suffix}")
        };
        self.map(
            &mut |name| Type::Var(rebase(name)),
            &mut |name| Length::Var(rebase(name)),
        )
    }

    /// Structural rebuild replacing type variables and length variables.
    pub fn map(
        &self,
        on_var: &mut impl FnMut(&str) -> Type,
        on_len: &mut impl FnMut(&str) -> Length,
    ) -> Type {
        match self {
            Type::Var(name) => on_var(name),
            Type::Seq(items) => Type::Seq(items.iter().map(|t| t.map(on_var, on_len)).collect()),
            Type::Tuple(items) => {
                Type::Tuple(items.iter().map(|t| t.map(on_var, on_len)).collect())
            }
            Type::List(elem, len) => Type::List(Box::new(elem.map(on_var, on_len)), len.map_vars(on_len)),
            Type::Coroutine(c) => Coroutine {
                recv: c.recv.map(on_var, on_len),
                yld: c.yld.map(on_var, on_len),
                label: c.label.clone(),
                starred: c.starred,
            }
            .into_type(),
            other => other.clone(),
        }
    }

    /// Rebuild replacing every length expression.
    pub fn map_lengths(&self, f: &mut impl FnMut(&Length) -> Length) -> Type {
        match self {
            Type::Seq(items) => Type::Seq(items.iter().map(|t| t.map_lengths(f)).collect()),
            Type::Tuple(items) => Type::Tuple(items.iter().map(|t| t.map_lengths(f)).collect()),
            Type::List(elem, len) => Type::List(Box::new(elem.map_lengths(f)), f(len)),
            Type::Coroutine(c) => Coroutine {
                recv: c.recv.map_lengths(f),
                yld: c.yld.map_lengths(f),
                label: c.label.clone(),
                starred: c.starred,
            }
            .into_type(),
            other => other.clone(),
        }
    }

    /// Drops coroutine labels and stars, keeping the shape.
    pub fn strip_labels(&self) -> Type {
        match self {
            Type::Seq(items) => Type::Seq(items.iter().map(Type::strip_labels).collect()),
            Type::Tuple(items) => Type::Tuple(items.iter().map(Type::strip_labels).collect()),
            Type::List(elem, len) => Type::List(Box::new(elem.strip_labels()), len.clone()),
            Type::Coroutine(c) => {
                Type::coroutine(c.recv.strip_labels(), c.yld.strip_labels())
            }
            other => other.clone(),
        }
    }

    /// True when no type or length variable occurs.
    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit(&mut |t| {
            match t {
                Type::Var(_) => ground = false,
                Type::List(_, len) if len.has_vars() => ground = false,
                _ => {}
            }
        });
        ground
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Type)) {
        f(self);
        match self {
            Type::Seq(items) | Type::Tuple(items) => items.iter().for_each(|t| t.visit(f)),
            Type::List(elem, _) => elem.visit(f),
            Type::Coroutine(c) => {
                c.recv.visit(f);
                c.yld.visit(f);
            }
            _ => {}
        }
    }

    /// Names of type variables and length variables, in occurrence order.
    pub fn variables(&self) -> (Vec<&str>, Vec<&str>) {
        let mut types = Vec::new();
        let mut lengths = Vec::new();
        self.visit(&mut |t| match t {
            Type::Var(name) => types.push(name.as_str()),
            Type::List(_, len) => len.collect_vars(&mut lengths),
            _ => {}
        });
        (types, lengths)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::print::write_type(f, self)
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::print::write_length(f, self)
    }
}

impl fmt::Display for Coroutine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::print::write_coroutine(f, self)
    }
}
