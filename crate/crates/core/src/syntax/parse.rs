//! Recursive-descent parser for type expressions.

use crate::types::{Coroutine, Length, Type};

use super::ParseError;

pub(crate) struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    // Column of `chars[0]` in the source line, 1-based.
    first_column: usize,
}

/// `label`, `label*` prefix of a labeled coroutine or declaration.
pub(crate) struct LabelPrefix {
    pub label: String,
    pub starred: bool,
}

impl Parser {
    pub fn new(text: &str, line: usize, first_column: usize) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            first_column,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        // Multi-line input (parse_type on a block of text) reports the real line.
        let consumed = &self.chars[..pos.min(self.chars.len())];
        let newlines = consumed.iter().filter(|c| **c == '\n').count();
        let column = match consumed.iter().rposition(|c| *c == '\n') {
            Some(nl) => pos - nl,
            None => pos + self.first_column,
        };
        ParseError {
            line: self.line + newlines,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(c) => self.error(format!("expected {wanted}, found `{c}`")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => self.pos += 1,
            _ => return None,
        }
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    /// Consumes `ident ['*'] ':'` when present; otherwise leaves the input
    /// untouched.
    pub fn label_prefix(&mut self) -> Option<LabelPrefix> {
        let save = self.pos;
        let label = self.ident();
        let starred = label.is_some() && self.eat('*');
        match label {
            Some(label) if self.eat(':') => Some(LabelPrefix { label, starred }),
            _ => {
                self.pos = save;
                None
            }
        }
    }

    pub fn ty(&mut self) -> Result<Type, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('<') => {
                let c = self.coroutine_body()?;
                self.reject_list_suffix("a coroutine")?;
                Ok(c.into_type())
            }
            Some('[') => {
                self.pos += 1;
                let mut items = vec![self.ty()?];
                while self.eat(',') {
                    items.push(self.ty()?);
                }
                self.expect(']')?;
                self.reject_list_suffix("a sequence")?;
                Ok(Type::Seq(items))
            }
            Some('(') => {
                self.pos += 1;
                if self.eat(')') {
                    return Err(self.error_at(start, "empty tuple"));
                }
                let mut items = vec![self.ty()?];
                while self.eat(',') {
                    items.push(self.ty()?);
                }
                self.expect(')')?;
                if items.len() < 2 {
                    return Err(self.error_at(start, "a tuple needs at least two components"));
                }
                self.list_suffix(Type::Tuple(items))
            }
            Some('@') => {
                self.pos += 1;
                let label = self
                    .ident()
                    .ok_or_else(|| self.error("expected a label after `@`"))?;
                self.list_suffix(Type::Ref(label))
            }
            Some('*') => Err(self.error("`*` must follow a label or `^`")),
            Some(_) => {
                if let Some(prefix) = self.label_prefix() {
                    if prefix.label == "void" {
                        return Err(self.error_at(start, "`void` cannot be a label"));
                    }
                    self.skip_ws();
                    if self.peek() != Some('<') {
                        return Err(self.error("a label must be attached to a coroutine"));
                    }
                    let mut c = self.coroutine_body()?;
                    c.label = Some(prefix.label);
                    c.starred = prefix.starred;
                    self.reject_list_suffix("a coroutine")?;
                    return Ok(c.into_type());
                }
                let name = self.ident().ok_or_else(|| self.unexpected("a type"))?;
                let atom = self.classify(&name, start)?;
                self.list_suffix(atom)
            }
            None => Err(self.unexpected("a type")),
        }
    }

    fn classify(&self, name: &str, start: usize) -> Result<Type, ParseError> {
        if name == "void" {
            return Ok(Type::Void);
        }
        let first = name.chars().next().unwrap_or('_');
        if first.is_uppercase() {
            Ok(Type::Concrete(name.to_string()))
        } else if first.is_lowercase() {
            Ok(Type::Var(name.to_string()))
        } else {
            Err(self.error_at(
                start,
                format!("`{name}` must start with an uppercase (concrete) or lowercase (variable) letter"),
            ))
        }
    }

    fn coroutine_body(&mut self) -> Result<Coroutine, ParseError> {
        self.expect('<')?;
        let recv = self.ty()?;
        self.expect(';')?;
        let yld = self.ty()?;
        self.expect('>')?;
        Ok(Coroutine::new(recv, yld))
    }

    fn reject_list_suffix(&mut self, what: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some('^') {
            Err(self.error(format!("`^` cannot be applied to {what}")))
        } else {
            Ok(())
        }
    }

    fn list_suffix(&mut self, elem: Type) -> Result<Type, ParseError> {
        if !self.eat('^') {
            return Ok(elem);
        }
        let len = if self.eat('*') {
            Length::Star
        } else {
            self.length()?
        };
        let t = Type::list(elem, len);
        self.reject_list_suffix("a list; parenthesize the element instead")?;
        Ok(t)
    }

    fn length(&mut self) -> Result<Length, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                digits
                    .parse()
                    .map(Length::Lit)
                    .map_err(|_| self.error_at(start, format!("length `{digits}` is too large")))
            }
            Some('*') => Err(self.error("`*` is only allowed directly after `^`")),
            _ => {
                let name = self.ident().ok_or_else(|| self.unexpected("a length"))?;
                self.skip_ws();
                let call = self.peek() == Some('(');
                match name.as_str() {
                    "dec" if call => {
                        self.expect('(')?;
                        let inner = self.length()?;
                        self.expect(')')?;
                        Ok(Length::dec(inner))
                    }
                    "min" if call => {
                        self.expect('(')?;
                        let a = self.length()?;
                        self.expect(',')?;
                        let b = self.length()?;
                        self.expect(')')?;
                        Ok(Length::min(a, b))
                    }
                    _ if name.chars().next().is_some_and(char::is_lowercase) => {
                        Ok(Length::Var(name))
                    }
                    _ => Err(self.error_at(start, format!("length variable `{name}` must start with a lowercase letter"))),
                }
            }
        }
    }
}
