//! Built-in example programs, written directly against the closure API.
//!
//! Each has a textual twin in the `programs/` directory of the
//! repository (and as a source constant here); the two compile to
//! programs with identical behavior, which the test suite checks
//! trace-for-trace.

use std::sync::Arc;

use crate::program::{compose_programs, make_rule, BodyFn, GuardFn, HeadPredicate, Program};
use crate::value::Value;

/// Greatest common divisor by repeated subtraction over a multiset of
/// integers: `zero` erases zeros, `subtract` replaces the larger of two
/// positive values by their difference.
pub fn gcd() -> Program {
    let is_zero: HeadPredicate = Arc::new(|v: &Value| v.as_int() == Some(0));
    let positive =
        || -> HeadPredicate { Arc::new(|v: &Value| matches!(v.as_int(), Some(n) if n > 0)) };

    let zero = make_rule(
        "zero",
        vec![],
        vec![is_zero],
        Arc::new(|_: &[Value]| Ok(true)) as GuardFn,
        Arc::new(|_: &[Value]| Ok(Vec::new())) as BodyFn,
    )
    .expect("zero rule is well-formed");

    let guard: GuardFn =
        Arc::new(
            |values: &[Value]| match (values[0].as_int(), values[1].as_int()) {
                (Some(n), Some(m)) => Ok(n <= m),
                _ => Ok(false),
            },
        );
    let body: BodyFn = Arc::new(|values: &[Value]| {
        let n = values[0].as_int().expect("head admits integers only");
        let m = values[1].as_int().expect("head admits integers only");
        let difference = m
            .checked_sub(n)
            .ok_or_else(crate::program::EvalError::overflow)?;
        Ok(vec![Value::Int(difference)])
    });
    let subtract = make_rule("subtract", vec![positive()], vec![positive()], guard, body)
        .expect("subtract rule is well-formed");

    compose_programs(vec![zero, subtract]).expect("gcd composes")
}

/// Transitive closure of a binary relation given as pairs: for edges
/// `(x, y)` and `(y, z)` with `x != z` the edge `(x, z)` is added. The
/// firing history keeps each configuration from firing twice.
pub fn trans() -> Program {
    let is_pair = || -> HeadPredicate {
        Arc::new(|v: &Value| matches!(v, Value::Tup(items) if items.len() == 2))
    };
    let guard: GuardFn = Arc::new(|values: &[Value]| match (&values[0], &values[1]) {
        (Value::Tup(left), Value::Tup(right)) if left.len() == 2 && right.len() == 2 => {
            Ok(left[1] == right[0] && left[0] != right[1])
        }
        _ => Ok(false),
    });
    let body: BodyFn = Arc::new(|values: &[Value]| match (&values[0], &values[1]) {
        (Value::Tup(left), Value::Tup(right)) if left.len() == 2 && right.len() == 2 => {
            Ok(vec![Value::pair(left[0].clone(), right[1].clone())])
        }
        _ => Err(crate::program::EvalError::type_mismatch(
            "trans body expects two pairs",
        )),
    });
    make_rule("trans", vec![is_pair(), is_pair()], vec![], guard, body)
        .expect("trans rule is well-formed")
}

/// Text-dialect source equivalent to [`gcd`].
pub const GCD_SOURCE: &str = "\
# greatest common divisor by repeated subtraction
zero @ 0 <=> .
subtract @ N \\ M <=> 0 < N && 0 < M && N <= M | M - N .
";

/// Text-dialect source equivalent to [`trans`].
pub const TRANS_SOURCE: &str = "\
# transitive closure of a binary relation
trans @ (X, Y), (Y, Z) ==> X != Z | (X, Z) .
";

/// Resolves a built-in program by name.
pub fn by_name(name: &str) -> Option<Program> {
    match name {
        "gcd" => Some(gcd()),
        "trans" => Some(trans()),
        _ => None,
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &["gcd", "trans"];
