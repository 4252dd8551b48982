//! Ground values rewritten by rules: integers, symbols and tuples.
//!
//! Values are immutable, structurally comparable and totally ordered
//! (`Int < Sym < Tup`, numeric / lexicographic / element-wise within a
//! variant). The canonical text syntax produced by [`Value::render`] is
//! accepted back by [`parse_value`], which the CLI query flag and trace
//! files rely on.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A source location, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub fn new(line: u32, column: u32) -> Self {
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

/// Errors from value construction and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("invalid symbol {name:?}: expected a lowercase letter followed by alphanumerics or underscores")]
    InvalidSymbol { name: String },
    #[error("tuple of length {len}: tuples carry at least two elements")]
    TupleTooShort { len: usize },
    #[error("syntax error at {position}: {message}")]
    Syntax { position: Position, message: String },
}

/// An identifier-shaped atom: a lowercase letter followed by
/// alphanumerics or underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Result<Symbol, ValueError> {
        let name = name.into();
        if is_symbol_name(&name) {
            Ok(Symbol(name))
        } else {
            Err(ValueError::InvalidSymbol { name })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Returns true for a valid symbol spelling.
pub fn is_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A ground value.
///
/// The derived ordering is the canonical one: variants compare in
/// declaration order (`Int < Sym < Tup`), integers numerically, symbols
/// lexicographically and tuples element-wise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Sym(Symbol),
    /// Invariant: at least two elements. Use [`Value::tuple`] to build one.
    Tup(Vec<Value>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(n)
    }

    pub fn sym(name: &str) -> Result<Value, ValueError> {
        Ok(Value::Sym(Symbol::new(name)?))
    }

    pub fn tuple(items: Vec<Value>) -> Result<Value, ValueError> {
        if items.len() < 2 {
            return Err(ValueError::TupleTooShort { len: items.len() });
        }
        Ok(Value::Tup(items))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tup(vec![a, b])
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// Canonical text form; [`parse_value`] inverts it.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => write!(f, "{s}"),
            Value::Tup(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Total order on values, the same as `Ord`.
pub fn compare(a: &Value, b: &Value) -> Ordering {
    a.cmp(b)
}

/// Parses a single value in canonical syntax, tolerating whitespace.
pub fn parse_value(text: &str) -> Result<Value, ValueError> {
    let mut p = ValueParser::new(text);
    p.skip_ws();
    let v = p.parse_value()?;
    p.skip_ws();
    p.expect_end()?;
    Ok(v)
}

/// Parses a comma-separated list of values; blank input is the empty list.
pub fn parse_values(text: &str) -> Result<Vec<Value>, ValueError> {
    let mut p = ValueParser::new(text);
    p.skip_ws();
    if p.at_end() {
        return Ok(Vec::new());
    }
    let mut values = vec![p.parse_value()?];
    p.skip_ws();
    while !p.at_end() {
        p.expect(',')?;
        p.skip_ws();
        values.push(p.parse_value()?);
        p.skip_ws();
    }
    Ok(values)
}

struct ValueParser<'a> {
    text: &'a str,
    rest: std::iter::Peekable<std::str::CharIndices<'a>>,
    offset: usize,
}

impl<'a> ValueParser<'a> {
    fn new(text: &'a str) -> Self {
        ValueParser {
            text,
            rest: text.char_indices().peekable(),
            offset: 0,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.rest.peek().map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (i, c) = self.rest.next()?;
        self.offset = i + c.len_utf8();
        Some(c)
    }

    fn at_end(&mut self) -> bool {
        self.rest.peek().is_none()
    }

    fn position(&mut self) -> Position {
        let upto = self.rest.peek().map(|&(i, _)| i).unwrap_or(self.text.len());
        let mut line = 1;
        let mut column = 1;
        for c in self.text[..upto].chars() {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        Position::new(line, column)
    }

    fn error(&mut self, message: impl Into<String>) -> ValueError {
        ValueError::Syntax {
            position: self.position(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, wanted: char) -> Result<(), ValueError> {
        match self.peek() {
            Some(c) if c == wanted => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected {wanted:?}, found {c:?}"))),
            None => Err(self.error(format!("expected {wanted:?}, found end of input"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ValueError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected trailing input starting at {c:?}"))),
        }
    }

    fn parse_value(&mut self) -> Result<Value, ValueError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' => self.parse_int(),
            Some(c) if c.is_ascii_lowercase() => self.parse_symbol(),
            Some('(') => self.parse_tuple(),
            Some(c) => Err(self.error(format!("expected a value, found {c:?}"))),
            None => Err(self.error("expected a value, found end of input")),
        }
    }

    fn parse_int(&mut self) -> Result<Value, ValueError> {
        let start = self.position();
        let mut digits = String::new();
        if self.peek() == Some('-') {
            digits.push('-');
            self.bump();
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.error("expected a digit after '-'"));
            }
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.bump().unwrap());
        }
        digits
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| ValueError::Syntax {
                position: start,
                message: format!("integer literal {digits} does not fit a 64-bit signed integer"),
            })
    }

    fn parse_symbol(&mut self) -> Result<Value, ValueError> {
        let mut name = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            name.push(self.bump().unwrap());
        }
        // first char is known lowercase, so this cannot fail
        Ok(Value::Sym(
            Symbol::new(name).expect("lexed symbol is valid"),
        ))
    }

    fn parse_tuple(&mut self) -> Result<Value, ValueError> {
        self.expect('(')?;
        self.skip_ws();
        let mut items = vec![self.parse_value()?];
        self.skip_ws();
        self.expect(',')?;
        loop {
            self.skip_ws();
            items.push(self.parse_value()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.bump();
                }
                Some(')') => {
                    self.bump();
                    return Ok(Value::Tup(items));
                }
                Some(c) => return Err(self.error(format!("expected ',' or ')', found {c:?}"))),
                None => return Err(self.error("unterminated tuple")),
            }
        }
    }
}
