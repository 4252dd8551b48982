//! Tokenizer for the rule dialect. Whitespace-insensitive between
//! tokens; `#` comments run to end of line.

use crate::value::Position;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Lowercase-initial identifier: rule names and symbol literals.
    LowerIdent(String),
    /// Uppercase-initial identifier: variables.
    UpperIdent(String),
    Int(i64),
    At,
    Comma,
    LParen,
    RParen,
    Backslash,
    Dot,
    Pipe,
    /// `<=>`
    SimpArrow,
    /// `==>`
    PropArrow,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    AndAnd,
    OrOr,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::LowerIdent(name) => format!("identifier {name:?}"),
            TokenKind::UpperIdent(name) => format!("variable {name:?}"),
            TokenKind::Int(n) => format!("integer {n}"),
            TokenKind::At => "'@'".to_string(),
            TokenKind::Comma => "','".to_string(),
            TokenKind::LParen => "'('".to_string(),
            TokenKind::RParen => "')'".to_string(),
            TokenKind::Backslash => "'\\'".to_string(),
            TokenKind::Dot => "'.'".to_string(),
            TokenKind::Pipe => "'|'".to_string(),
            TokenKind::SimpArrow => "'<=>'".to_string(),
            TokenKind::PropArrow => "'==>'".to_string(),
            TokenKind::Plus => "'+'".to_string(),
            TokenKind::Minus => "'-'".to_string(),
            TokenKind::Star => "'*'".to_string(),
            TokenKind::Slash => "'/'".to_string(),
            TokenKind::Percent => "'%'".to_string(),
            TokenKind::AndAnd => "'&&'".to_string(),
            TokenKind::OrOr => "'||'".to_string(),
            TokenKind::Bang => "'!'".to_string(),
            TokenKind::Lt => "'<'".to_string(),
            TokenKind::Le => "'<='".to_string(),
            TokenKind::Gt => "'>'".to_string(),
            TokenKind::Ge => "'>='".to_string(),
            TokenKind::EqEq => "'=='".to_string(),
            TokenKind::Ne => "'!='".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub position: Position,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        let token = lexer.next_token()?;
        let done = token.kind == TokenKind::Eof;
        tokens.push(token);
        if done {
            return Ok(tokens);
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Lexer<'_> {
    fn position(&self) -> Position {
        Position::new(self.line, self.column)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let position = self.position();
        let kind = match self.peek() {
            None => TokenKind::Eof,
            Some(c) if c.is_ascii_digit() => {
                let mut digits = String::new();
                while matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    digits.push(self.bump().unwrap());
                }
                let n = digits.parse::<i64>().map_err(|_| ParseError::Syntax {
                    position,
                    message: format!(
                        "integer literal {digits} does not fit a 64-bit signed integer"
                    ),
                })?;
                TokenKind::Int(n)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while matches!(self.peek(), Some(d) if d.is_ascii_alphanumeric() || d == '_') {
                    name.push(self.bump().unwrap());
                }
                if c.is_ascii_lowercase() {
                    TokenKind::LowerIdent(name)
                } else {
                    TokenKind::UpperIdent(name)
                }
            }
            Some(c) => {
                self.bump();
                match c {
                    '@' => TokenKind::At,
                    ',' => TokenKind::Comma,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '\\' => TokenKind::Backslash,
                    '.' => TokenKind::Dot,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '%' => TokenKind::Percent,
                    '|' => {
                        if self.eat('|') {
                            TokenKind::OrOr
                        } else {
                            TokenKind::Pipe
                        }
                    }
                    '&' => {
                        if self.eat('&') {
                            TokenKind::AndAnd
                        } else {
                            return Err(ParseError::Syntax {
                                position,
                                message: "expected '&&'".to_string(),
                            });
                        }
                    }
                    '!' => {
                        if self.eat('=') {
                            TokenKind::Ne
                        } else {
                            TokenKind::Bang
                        }
                    }
                    '<' => {
                        if self.eat('=') {
                            if self.eat('>') {
                                TokenKind::SimpArrow
                            } else {
                                TokenKind::Le
                            }
                        } else {
                            TokenKind::Lt
                        }
                    }
                    '>' => {
                        if self.eat('=') {
                            TokenKind::Ge
                        } else {
                            TokenKind::Gt
                        }
                    }
                    '=' => {
                        if self.eat('=') {
                            if self.eat('>') {
                                TokenKind::PropArrow
                            } else {
                                TokenKind::EqEq
                            }
                        } else {
                            return Err(ParseError::Syntax {
                                position,
                                message: "expected '==' or '==>'".to_string(),
                            });
                        }
                    }
                    other => {
                        return Err(ParseError::Syntax {
                            position,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
        };
        Ok(Token { kind, position })
    }
}
