//! Strict evaluation of guard and body expressions under a variable
//! binding.
//!
//! Arithmetic is 64-bit signed with overflow reported as an error, `/`
//! and `%` are integer operations that reject zero divisors, ordered
//! comparisons need integers on both sides, and equality is structural
//! over any two values. Conditions (comparisons and boolean connectives)
//! are only legal in guard position; bodies must produce values.

use std::collections::BTreeMap;

use crate::program::{EvalError, EvalErrorKind};
use crate::value::Value;

use super::ast::{BinOp, Expr, UnaryOp};

/// Variable environment built from the matched values.
pub type Binding = BTreeMap<String, Value>;

enum Evaluated {
    Val(Value),
    Truth(bool),
}

impl Evaluated {
    fn describe(&self) -> &'static str {
        match self {
            Evaluated::Val(Value::Int(_)) => "an integer",
            Evaluated::Val(Value::Sym(_)) => "a symbol",
            Evaluated::Val(Value::Tup(_)) => "a tuple",
            Evaluated::Truth(_) => "a condition",
        }
    }
}

/// Evaluates an expression in value position, as in a rule body.
pub fn eval_expr(expr: &Expr, binding: &Binding) -> Result<Value, EvalError> {
    match eval(expr, binding)? {
        Evaluated::Val(value) => Ok(value),
        truth => Err(EvalError::type_mismatch(format!(
            "expected a value, found {}",
            truth.describe()
        ))
        .at(expr.position())),
    }
}

/// Evaluates an expression in guard position, where it must be a
/// condition.
pub fn eval_guard_expr(expr: &Expr, binding: &Binding) -> Result<bool, EvalError> {
    match eval(expr, binding)? {
        Evaluated::Truth(b) => Ok(b),
        value => Err(EvalError::type_mismatch(format!(
            "a guard must be a condition, found {}",
            value.describe()
        ))
        .at(expr.position())),
    }
}

fn eval(expr: &Expr, binding: &Binding) -> Result<Evaluated, EvalError> {
    match expr {
        Expr::Lit(value, _) => Ok(Evaluated::Val(value.clone())),
        Expr::Var(name, position) => match binding.get(name) {
            Some(value) => Ok(Evaluated::Val(value.clone())),
            None => Err(EvalError::new(
                EvalErrorKind::UnboundVariable(name.clone()),
                Some(*position),
            )),
        },
        Expr::Unary(op, operand, position) => {
            let operand = eval(operand, binding)?;
            match (op, operand) {
                (UnaryOp::Neg, Evaluated::Val(Value::Int(n))) => n
                    .checked_neg()
                    .map(|n| Evaluated::Val(Value::Int(n)))
                    .ok_or_else(|| EvalError::overflow().at(*position)),
                (UnaryOp::Not, Evaluated::Truth(b)) => Ok(Evaluated::Truth(!b)),
                (UnaryOp::Neg, other) => Err(EvalError::type_mismatch(format!(
                    "cannot negate {}",
                    other.describe()
                ))
                .at(*position)),
                (UnaryOp::Not, other) => Err(EvalError::type_mismatch(format!(
                    "'!' needs a condition, found {}",
                    other.describe()
                ))
                .at(*position)),
            }
        }
        Expr::Binary(op, left, right, position) => {
            eval_binary(*op, left, right, binding, *position)
        }
        Expr::Tuple(items, _) => {
            let values = items
                .iter()
                .map(|item| eval_expr(item, binding))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Evaluated::Val(Value::Tup(values)))
        }
    }
}

fn eval_binary(
    op: BinOp,
    left: &Expr,
    right: &Expr,
    binding: &Binding,
    position: crate::value::Position,
) -> Result<Evaluated, EvalError> {
    // boolean connectives short-circuit
    if matches!(op, BinOp::And | BinOp::Or) {
        let left = match eval(left, binding)? {
            Evaluated::Truth(b) => b,
            value => {
                return Err(EvalError::type_mismatch(format!(
                    "'{}' needs conditions, found {}",
                    op.token(),
                    value.describe()
                ))
                .at(position))
            }
        };
        match (op, left) {
            (BinOp::And, false) => return Ok(Evaluated::Truth(false)),
            (BinOp::Or, true) => return Ok(Evaluated::Truth(true)),
            _ => {}
        }
        return match eval(right, binding)? {
            Evaluated::Truth(b) => Ok(Evaluated::Truth(b)),
            value => Err(EvalError::type_mismatch(format!(
                "'{}' needs conditions, found {}",
                op.token(),
                value.describe()
            ))
            .at(position)),
        };
    }

    let left = eval(left, binding)?;
    let right = eval(right, binding)?;

    match op {
        BinOp::Eq | BinOp::Ne => match (left, right) {
            (Evaluated::Val(a), Evaluated::Val(b)) => {
                let equal = a == b;
                Ok(Evaluated::Truth(if op == BinOp::Eq {
                    equal
                } else {
                    !equal
                }))
            }
            (a, b) => Err(EvalError::type_mismatch(format!(
                "equality compares values, found {} and {}",
                a.describe(),
                b.describe()
            ))
            .at(position)),
        },
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => match (left, right) {
            (Evaluated::Val(Value::Int(a)), Evaluated::Val(Value::Int(b))) => {
                let truth = match op {
                    BinOp::Lt => a < b,
                    BinOp::Le => a <= b,
                    BinOp::Gt => a > b,
                    _ => a >= b,
                };
                Ok(Evaluated::Truth(truth))
            }
            (a, b) => Err(EvalError::type_mismatch(format!(
                "ordered comparison needs integers, found {} and {}",
                a.describe(),
                b.describe()
            ))
            .at(position)),
        },
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => match (left, right) {
            (Evaluated::Val(Value::Int(a)), Evaluated::Val(Value::Int(b))) => {
                let result = match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    BinOp::Div if b == 0 => {
                        return Err(EvalError::new(
                            EvalErrorKind::DivisionByZero,
                            Some(position),
                        ))
                    }
                    BinOp::Div => a.checked_div(b),
                    BinOp::Mod if b == 0 => {
                        return Err(EvalError::new(
                            EvalErrorKind::DivisionByZero,
                            Some(position),
                        ))
                    }
                    _ => a.checked_rem(b),
                };
                result
                    .map(|n| Evaluated::Val(Value::Int(n)))
                    .ok_or_else(|| EvalError::overflow().at(position))
            }
            (a, b) => Err(EvalError::type_mismatch(format!(
                "'{}' needs integers, found {} and {}",
                op.token(),
                a.describe(),
                b.describe()
            ))
            .at(position)),
        },
        BinOp::And | BinOp::Or => unreachable!("handled above"),
    }
}
