//! A small textual rule dialect and its compiler.
//!
//! Programs are lists of rules over integers, symbols and tuples:
//!
//! ```text
//! # gcd by repeated subtraction
//! zero @ 0 <=> .
//! subtract @ N \ M <=> 0 < N && 0 < M && N <= M | M - N .
//!
//! # transitive closure of a relation of pairs
//! trans @ (X, Y), (Y, Z) ==> X != Z | (X, Z) .
//! ```
//!
//! `name @ R <=> body .` consumes the matched values, `name @ K ==> body .`
//! keeps them, and `name @ K \ R <=> body .` keeps the left part and
//! consumes the right. The guard before `|` defaults to true; the body
//! is a comma-separated list of value expressions and may be empty.
//! Variables are uppercase-initial, symbols lowercase-initial; `#`
//! starts a line comment.
//!
//! [`parse_program`] yields the syntax tree (with duplicate-name,
//! empty-head and unbound-variable checks done), [`compile_rules`]
//! lowers it to a closure-backed [`Program`], and [`compile_source`]
//! does both.

mod ast;
mod compile;
mod eval;
mod lexer;
mod parser;

pub use ast::{format_rules, BinOp, Expr, Pattern, RuleKind, RuleSyntax, UnaryOp};
pub use compile::{compile_rules, pattern_admits};
pub use eval::{eval_expr, eval_guard_expr, Binding};
pub use parser::parse_program;

use thiserror::Error;

use crate::program::{Program, ProgramError};
use crate::value::Position;

/// Parse-stage errors, all carrying source positions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: Position, message: String },
    #[error(
        "rule {name:?} at {position} has an empty head: kept and removed cannot both be empty"
    )]
    EmptyHead { position: Position, name: String },
    #[error("duplicate rule name {name:?} at {position}")]
    DuplicateRuleName { position: Position, name: String },
    #[error("variable {variable} at {position} is not bound by any head pattern of rule {rule:?}")]
    UnboundVariable {
        position: Position,
        variable: String,
        rule: String,
    },
}

/// Errors from loading a program out of source text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Program(#[from] ProgramError),
}

/// Parses and compiles a program in one go.
pub fn compile_source(text: &str) -> Result<Program, SourceError> {
    let rules = parse_program(text)?;
    Ok(compile_rules(&rules)?)
}
