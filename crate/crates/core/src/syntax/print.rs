use std::fmt::{self, Write};

use crate::types::{Coroutine, Length, Type};

const GREEK: [char; 24] = [
    'α', 'β', 'γ', 'δ', 'ε', 'ζ', 'η', 'θ', 'ι', 'κ', 'λ', 'μ', 'ν', 'ξ', 'ο', 'π', 'ρ', 'σ', 'τ',
    'υ', 'φ', 'χ', 'ψ', 'ω',
];

/// Canonical rendering of a type.
pub fn print_type(t: &Type) -> String {
    t.to_string()
}

/// Name of fresh symbol `id`: α0, β0, ..., ω0, α1, ...
pub fn fresh_name(id: u32) -> String {
    let letter = GREEK[(id as usize) % GREEK.len()];
    format!("{letter}{}", id as usize / GREEK.len())
}

pub(crate) fn write_type(f: &mut impl Write, t: &Type) -> fmt::Result {
    match t {
        Type::Void => f.write_str("void"),
        Type::Concrete(name) | Type::Var(name) => f.write_str(name),
        Type::Ref(label) => write!(f, "@{label}"),
        Type::Seq(items) => {
            f.write_char('[')?;
            write_items(f, items)?;
            f.write_char(']')
        }
        Type::Tuple(items) => {
            f.write_char('(')?;
            write_items(f, items)?;
            f.write_char(')')
        }
        Type::List(elem, len) => {
            write_type(f, elem)?;
            f.write_char('^')?;
            write_length(f, len)
        }
        Type::Coroutine(c) => write_coroutine(f, c),
    }
}

fn write_items(f: &mut impl Write, items: &[Type]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_type(f, item)?;
    }
    Ok(())
}

pub(crate) fn write_coroutine(f: &mut impl Write, c: &Coroutine) -> fmt::Result {
    if let Some(label) = &c.label {
        f.write_str(label)?;
        if c.starred {
            f.write_char('*')?;
        }
        f.write_str(": ")?;
    }
    f.write_char('<')?;
    write_type(f, &c.recv)?;
    f.write_str(" ; ")?;
    write_type(f, &c.yld)?;
    f.write_char('>')
}

pub(crate) fn write_length(f: &mut impl Write, l: &Length) -> fmt::Result {
    match l {
        Length::Lit(n) => write!(f, "{n}"),
        Length::Var(name) => f.write_str(name),
        Length::Fresh(id) => f.write_str(&fresh_name(*id)),
        Length::Dec(inner) => {
            f.write_str("dec(")?;
            write_length(f, inner)?;
            f.write_char(')')
        }
        Length::Min(a, b) => {
            f.write_str("min(")?;
            write_length(f, a)?;
            f.write_str(", ")?;
            write_length(f, b)?;
            f.write_char(')')
        }
        Length::Star => f.write_char('*'),
    }
}
