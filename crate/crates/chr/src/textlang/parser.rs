//! Recursive-descent parser for the rule dialect.
//!
//! Grammar:
//!
//! ```text
//! program  := rule+
//! rule     := name "@" heads ("\" heads)? ("<=>" | "==>") (expr "|")? bodylist? "."
//! heads    := pattern ("," pattern)*
//! pattern  := "-"? INT | VAR | SYM | "(" pattern ("," pattern)+ ")"
//! bodylist := expr ("," expr)*
//! ```
//!
//! `<=>` without `\` consumes its whole head; `\` keeps the left part
//! and consumes the right; `==>` keeps everything. After parsing, rule
//! names must be pairwise distinct and every guard/body variable must be
//! bound by a head pattern.

use std::collections::{BTreeMap, BTreeSet};

use crate::value::{Position, Symbol, Value};

use super::ast::{BinOp, Expr, Pattern, RuleKind, RuleSyntax, UnaryOp};
use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;

/// Parses a whole program and runs the static checks.
pub fn parse_program(text: &str) -> Result<Vec<RuleSyntax>, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, at: 0 };
    let mut rules = Vec::new();
    while parser.peek().kind != TokenKind::Eof {
        rules.push(parser.rule()?);
    }
    if rules.is_empty() {
        return Err(ParseError::Syntax {
            position: Position::new(1, 1),
            message: "a program needs at least one rule".to_string(),
        });
    }
    check_distinct_names(&rules)?;
    for rule in &rules {
        check_range_restriction(rule)?;
    }
    Ok(rules)
}

fn check_distinct_names(rules: &[RuleSyntax]) -> Result<(), ParseError> {
    let mut seen = BTreeMap::new();
    for rule in rules {
        if seen.insert(rule.name.clone(), ()).is_some() {
            return Err(ParseError::DuplicateRuleName {
                position: rule.position,
                name: rule.name.clone(),
            });
        }
    }
    Ok(())
}

/// Every variable used in the guard or body must be bound by some head
/// pattern; head-instantiation then grounds the whole rule.
fn check_range_restriction(rule: &RuleSyntax) -> Result<(), ParseError> {
    let mut bound = BTreeSet::new();
    for pattern in rule.kept.iter().chain(&rule.removed) {
        collect_pattern_vars(pattern, &mut bound);
    }
    let check = |expr: &Expr| -> Result<(), ParseError> {
        if let Some((name, position)) = first_unbound_var(expr, &bound) {
            return Err(ParseError::UnboundVariable {
                position,
                variable: name,
                rule: rule.name.clone(),
            });
        }
        Ok(())
    };
    if let Some(guard) = &rule.guard {
        check(guard)?;
    }
    for expr in &rule.body {
        check(expr)?;
    }
    Ok(())
}

fn collect_pattern_vars(pattern: &Pattern, out: &mut BTreeSet<String>) {
    match pattern {
        Pattern::Lit(..) => {}
        Pattern::Var(name, _) => {
            out.insert(name.clone());
        }
        Pattern::Tuple(items, _) => {
            for item in items {
                collect_pattern_vars(item, out);
            }
        }
    }
}

fn first_unbound_var(expr: &Expr, bound: &BTreeSet<String>) -> Option<(String, Position)> {
    match expr {
        Expr::Lit(..) => None,
        Expr::Var(name, position) => (!bound.contains(name)).then(|| (name.clone(), *position)),
        Expr::Unary(_, operand, _) => first_unbound_var(operand, bound),
        Expr::Binary(_, left, right, _) => {
            first_unbound_var(left, bound).or_else(|| first_unbound_var(right, bound))
        }
        Expr::Tuple(items, _) => items.iter().find_map(|e| first_unbound_var(e, bound)),
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        token
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("expected {}", kind.describe())))
        }
    }

    fn unexpected(&self, context: &str) -> ParseError {
        let token = self.peek();
        ParseError::Syntax {
            position: token.position,
            message: format!("{context}, found {}", token.kind.describe()),
        }
    }

    fn rule(&mut self) -> Result<RuleSyntax, ParseError> {
        let position = self.peek().position;
        let name = match &self.peek().kind {
            TokenKind::LowerIdent(name) => {
                let name = name.clone();
                self.bump();
                name
            }
            _ => return Err(self.unexpected("expected a rule name")),
        };
        self.expect(TokenKind::At)?;

        if matches!(
            self.peek().kind,
            TokenKind::SimpArrow | TokenKind::PropArrow | TokenKind::Backslash
        ) {
            return Err(ParseError::EmptyHead {
                position: self.peek().position,
                name,
            });
        }

        let first = self.patterns()?;
        let second = if self.eat(&TokenKind::Backslash) {
            Some(self.patterns()?)
        } else {
            None
        };

        let arrow = self.peek().clone();
        let (kind, kept, removed) = match (&arrow.kind, second) {
            (TokenKind::SimpArrow, None) => {
                self.bump();
                (RuleKind::Simplification, Vec::new(), first)
            }
            (TokenKind::SimpArrow, Some(removed)) => {
                self.bump();
                (RuleKind::Simpagation, first, removed)
            }
            (TokenKind::PropArrow, None) => {
                self.bump();
                (RuleKind::Propagation, first, Vec::new())
            }
            (TokenKind::PropArrow, Some(_)) => {
                return Err(ParseError::Syntax {
                    position: arrow.position,
                    message: "a propagation rule keeps its whole head and cannot have a '\\' part"
                        .to_string(),
                });
            }
            _ => return Err(self.unexpected("expected '<=>' or '==>'")),
        };

        let mut guard = None;
        let mut body = Vec::new();
        if !self.eat(&TokenKind::Dot) {
            let first_expr = self.expr()?;
            if self.eat(&TokenKind::Pipe) {
                guard = Some(first_expr);
                if !self.eat(&TokenKind::Dot) {
                    body = self.body_list()?;
                    self.expect(TokenKind::Dot)?;
                }
            } else {
                body.push(first_expr);
                while self.eat(&TokenKind::Comma) {
                    body.push(self.expr()?);
                }
                self.expect(TokenKind::Dot)?;
            }
        }

        Ok(RuleSyntax {
            name,
            kind,
            kept,
            removed,
            guard,
            body,
            position,
        })
    }

    fn body_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut body = vec![self.expr()?];
        while self.eat(&TokenKind::Comma) {
            body.push(self.expr()?);
        }
        Ok(body)
    }

    fn patterns(&mut self) -> Result<Vec<Pattern>, ParseError> {
        let mut patterns = vec![self.pattern()?];
        while self.eat(&TokenKind::Comma) {
            patterns.push(self.pattern()?);
        }
        Ok(patterns)
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let token = self.peek().clone();
        match token.kind {
            TokenKind::Int(n) => {
                self.bump();
                Ok(Pattern::Lit(Value::Int(n), token.position))
            }
            TokenKind::Minus => {
                self.bump();
                match self.peek().kind.clone() {
                    TokenKind::Int(n) => {
                        self.bump();
                        Ok(Pattern::Lit(Value::Int(-n), token.position))
                    }
                    _ => Err(self.unexpected("expected an integer after '-'")),
                }
            }
            TokenKind::UpperIdent(name) => {
                self.bump();
                Ok(Pattern::Var(name, token.position))
            }
            TokenKind::LowerIdent(name) => {
                self.bump();
                let symbol = Symbol::new(name).expect("lexer produced a valid symbol");
                Ok(Pattern::Lit(Value::Sym(symbol), token.position))
            }
            TokenKind::LParen => {
                self.bump();
                let mut items = vec![self.pattern()?];
                self.expect(TokenKind::Comma)?;
                items.push(self.pattern()?);
                while self.eat(&TokenKind::Comma) {
                    items.push(self.pattern()?);
                }
                self.expect(TokenKind::RParen)?;
                Ok(Pattern::Tuple(items, token.position))
            }
            _ => Err(self.unexpected("expected a pattern")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.and_expr()?;
        while self.peek().kind == TokenKind::OrOr {
            let position = self.bump().position;
            let right = self.and_expr()?;
            left = Expr::Binary(BinOp::Or, Box::new(left), Box::new(right), position);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.comparison()?;
        while self.peek().kind == TokenKind::AndAnd {
            let position = self.bump().position;
            let right = self.comparison()?;
            left = Expr::Binary(BinOp::And, Box::new(left), Box::new(right), position);
        }
        Ok(left)
    }

    /// Comparisons are non-associative: `a < b < c` is a syntax error.
    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let left = self.additive()?;
        let op = match self.peek().kind {
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::Ne => BinOp::Ne,
            _ => return Ok(left),
        };
        let position = self.bump().position;
        let right = self.additive()?;
        if matches!(
            self.peek().kind,
            TokenKind::Lt
                | TokenKind::Le
                | TokenKind::Gt
                | TokenKind::Ge
                | TokenKind::EqEq
                | TokenKind::Ne
        ) {
            return Err(self.unexpected("comparisons do not chain; parenthesize"));
        }
        Ok(Expr::Binary(op, Box::new(left), Box::new(right), position))
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(left),
            };
            let position = self.bump().position;
            let right = self.multiplicative()?;
            left = Expr::Binary(op, Box::new(left), Box::new(right), position);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                TokenKind::Percent => BinOp::Mod,
                _ => return Ok(left),
            };
            let position = self.bump().position;
            let right = self.unary()?;
            left = Expr::Binary(op, Box::new(left), Box::new(right), position);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().kind {
            TokenKind::Minus => {
                let position = self.bump().position;
                let operand = self.unary()?;
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(operand), position))
            }
            TokenKind::Bang => {
                let position = self.bump().position;
                let operand = self.unary()?;
                Ok(Expr::Unary(UnaryOp::Not, Box::new(operand), position))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let token = self.peek().clone();
        match token.kind {
            TokenKind::Int(n) => {
                self.bump();
                Ok(Expr::Lit(Value::Int(n), token.position))
            }
            TokenKind::UpperIdent(name) => {
                self.bump();
                Ok(Expr::Var(name, token.position))
            }
            TokenKind::LowerIdent(name) => {
                self.bump();
                let symbol = Symbol::new(name).expect("lexer produced a valid symbol");
                Ok(Expr::Lit(Value::Sym(symbol), token.position))
            }
            TokenKind::LParen => {
                self.bump();
                let first = self.expr()?;
                if self.eat(&TokenKind::RParen) {
                    // plain grouping
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&TokenKind::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(TokenKind::RParen)?;
                if items.len() < 2 {
                    return Err(ParseError::Syntax {
                        position: token.position,
                        message: "tuples carry at least two elements".to_string(),
                    });
                }
                Ok(Expr::Tuple(items, token.position))
            }
            _ => Err(self.unexpected("expected an expression")),
        }
    }
}
