//! Syntax tree for the rule dialect, with a pretty-printer.
//!
//! Equality on patterns and expressions ignores source positions, so a
//! printed-and-reparsed tree compares equal to the original.

use std::fmt;

use crate::value::{Position, Value};

/// One parsed rule.
#[derive(Debug, Clone)]
pub struct RuleSyntax {
    pub name: String,
    pub kind: RuleKind,
    pub kept: Vec<Pattern>,
    pub removed: Vec<Pattern>,
    pub guard: Option<Expr>,
    pub body: Vec<Expr>,
    pub position: Position,
}

impl PartialEq for RuleSyntax {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.kept == other.kept
            && self.removed == other.removed
            && self.guard == other.guard
            && self.body == other.body
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    /// `name @ R <=> B`: matched values are consumed.
    Simplification,
    /// `name @ K ==> B`: matched values survive.
    Propagation,
    /// `name @ K \ R <=> B`: K survives, R is consumed.
    Simpagation,
}

/// A head pattern. Literals and tuple shapes are checked per value;
/// variables bind and may repeat across patterns to express joins.
#[derive(Debug, Clone)]
pub enum Pattern {
    Lit(Value, Position),
    Var(String, Position),
    Tuple(Vec<Pattern>, Position),
}

impl Pattern {
    pub fn position(&self) -> Position {
        match self {
            Pattern::Lit(_, p) | Pattern::Var(_, p) | Pattern::Tuple(_, p) => *p,
        }
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Pattern::Lit(a, _), Pattern::Lit(b, _)) => a == b,
            (Pattern::Var(a, _), Pattern::Var(b, _)) => a == b,
            (Pattern::Tuple(a, _), Pattern::Tuple(b, _)) => a == b,
            _ => false,
        }
    }
}

/// A guard or body expression.
#[derive(Debug, Clone)]
pub enum Expr {
    Lit(Value, Position),
    Var(String, Position),
    Unary(UnaryOp, Box<Expr>, Position),
    Binary(BinOp, Box<Expr>, Box<Expr>, Position),
    Tuple(Vec<Expr>, Position),
}

impl Expr {
    pub fn position(&self) -> Position {
        match self {
            Expr::Lit(_, p)
            | Expr::Var(_, p)
            | Expr::Unary(_, _, p)
            | Expr::Binary(_, _, _, p)
            | Expr::Tuple(_, p) => *p,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Expr::Lit(a, _), Expr::Lit(b, _)) => a == b,
            (Expr::Var(a, _), Expr::Var(b, _)) => a == b,
            (Expr::Unary(op_a, a, _), Expr::Unary(op_b, b, _)) => op_a == op_b && a == b,
            (Expr::Binary(op_a, l_a, r_a, _), Expr::Binary(op_b, l_b, r_b, _)) => {
                op_a == op_b && l_a == l_b && r_a == r_b
            }
            (Expr::Tuple(a, _), Expr::Tuple(b, _)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn token(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; comparisons are non-associative.
    fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
        }
    }

    fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

const UNARY_PRECEDENCE: u8 = 6;
const ATOM_PRECEDENCE: u8 = 7;

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Lit(value, _) => write!(f, "{value}"),
            Pattern::Var(name, _) => write!(f, "{name}"),
            Pattern::Tuple(items, _) => {
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

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, expr: &Expr, min_precedence: u8) -> fmt::Result {
    let own = match expr {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(..) => UNARY_PRECEDENCE,
        _ => ATOM_PRECEDENCE,
    };
    let needs_parens = own < min_precedence;
    if needs_parens {
        write!(f, "(")?;
    }
    match expr {
        Expr::Lit(value, _) => write!(f, "{value}")?,
        Expr::Var(name, _) => write!(f, "{name}")?,
        Expr::Unary(op, operand, _) => {
            match op {
                UnaryOp::Neg => write!(f, "-")?,
                UnaryOp::Not => write!(f, "!")?,
            }
            write_expr(f, operand, UNARY_PRECEDENCE)?;
        }
        Expr::Binary(op, left, right, _) => {
            let p = op.precedence();
            // comparisons do not chain: parenthesize nested ones
            let (left_min, right_min) = if op.is_comparison() {
                (p + 1, p + 1)
            } else {
                (p, p + 1)
            };
            write_expr(f, left, left_min)?;
            write!(f, " {} ", op.token())?;
            write_expr(f, right, right_min)?;
        }
        Expr::Tuple(items, _) => {
            write!(f, "(")?;
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, item, 0)?;
            }
            write!(f, ")")?;
        }
    }
    if needs_parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for RuleSyntax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ ", self.name)?;
        let write_patterns = |f: &mut fmt::Formatter<'_>, patterns: &[Pattern]| -> fmt::Result {
            for (i, pattern) in patterns.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{pattern}")?;
            }
            Ok(())
        };
        match self.kind {
            RuleKind::Simplification => {
                write_patterns(f, &self.removed)?;
                write!(f, " <=>")?;
            }
            RuleKind::Propagation => {
                write_patterns(f, &self.kept)?;
                write!(f, " ==>")?;
            }
            RuleKind::Simpagation => {
                write_patterns(f, &self.kept)?;
                write!(f, " \\ ")?;
                write_patterns(f, &self.removed)?;
                write!(f, " <=>")?;
            }
        }
        if let Some(guard) = &self.guard {
            write!(f, " {guard} |")?;
        }
        for (i, expr) in self.body.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {expr}")?;
        }
        write!(f, " .")
    }
}

/// Prints a whole program, one rule per line.
pub fn format_rules(rules: &[RuleSyntax]) -> String {
    let mut out = String::new();
    for rule in rules {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    out
}
