//! Compiles parsed rules down to closure-backed programs.
//!
//! Head predicates only see one value at a time, so a pattern compiles
//! to a per-value shape-and-literal check with variables accepting
//! anything. Cross-position variable sharing becomes equality conjuncts
//! that run at the front of the compiled guard, followed by the written
//! guard under the variable binding. The binding reads each variable
//! from its first occurrence, ordered kept-then-removed.

use std::sync::Arc;

use crate::program::{
    compose_programs, make_rule, BodyFn, EvalError, GuardFn, HeadPredicate, Program, ProgramError,
};
use crate::value::Value;

use super::ast::{Expr, Pattern, RuleSyntax};
use super::eval::{eval_expr, eval_guard_expr, Binding};

/// True iff the value fits the pattern's shape and literals; variable
/// bindings are not this check's business.
pub fn pattern_admits(pattern: &Pattern, value: &Value) -> bool {
    match pattern {
        Pattern::Lit(literal, _) => value == literal,
        Pattern::Var(..) => true,
        Pattern::Tuple(items, _) => match value {
            Value::Tup(elements) => {
                elements.len() == items.len()
                    && items
                        .iter()
                        .zip(elements)
                        .all(|(item, element)| pattern_admits(item, element))
            }
            _ => false,
        },
    }
}

/// Compiles rules and composes them in source order.
pub fn compile_rules(rules: &[RuleSyntax]) -> Result<Program, ProgramError> {
    let programs = rules
        .iter()
        .map(compile_rule)
        .collect::<Result<Vec<_>, _>>()?;
    compose_programs(programs)
}

fn compile_rule(rule: &RuleSyntax) -> Result<Program, ProgramError> {
    let kept: Vec<HeadPredicate> = rule.kept.iter().map(head_predicate).collect();
    let removed: Vec<HeadPredicate> = rule.removed.iter().map(head_predicate).collect();

    let patterns: Vec<&Pattern> = rule.kept.iter().chain(&rule.removed).collect();
    let plan = Arc::new(EvalPlan::for_rule(
        &patterns,
        rule.guard.clone(),
        rule.body.clone(),
    ));

    let guard: GuardFn = {
        let plan = plan.clone();
        Arc::new(move |values: &[Value]| plan.guard(values))
    };
    let body: BodyFn = {
        let plan = plan.clone();
        Arc::new(move |values: &[Value]| plan.body(values))
    };

    make_rule(rule.name.clone(), kept, removed, guard, body)
}

fn head_predicate(pattern: &Pattern) -> HeadPredicate {
    let pattern = pattern.clone();
    Arc::new(move |value: &Value| pattern_admits(&pattern, value))
}

/// Where a variable occurrence sits: head position plus tuple path.
type Occurrence = (usize, Vec<usize>);

struct EvalPlan {
    /// First occurrence of each variable, in textual order.
    bindings: Vec<(String, Occurrence)>,
    /// Equality constraints tying repeated occurrences to the first.
    joins: Vec<(Occurrence, Occurrence)>,
    guard: Option<Expr>,
    body: Vec<Expr>,
}

impl EvalPlan {
    fn for_rule(patterns: &[&Pattern], guard: Option<Expr>, body: Vec<Expr>) -> EvalPlan {
        let mut bindings: Vec<(String, Occurrence)> = Vec::new();
        let mut joins = Vec::new();
        for (position, pattern) in patterns.iter().enumerate() {
            collect_occurrences(
                pattern,
                position,
                &mut Vec::new(),
                &mut bindings,
                &mut joins,
            );
        }
        EvalPlan {
            bindings,
            joins,
            guard,
            body,
        }
    }

    fn binding(&self, values: &[Value]) -> Option<Binding> {
        let mut binding = Binding::new();
        for (name, occurrence) in &self.bindings {
            let value = extract(values, occurrence)?;
            binding.insert(name.clone(), value.clone());
        }
        Some(binding)
    }

    /// Joins first, then the written guard. Values that do not reach the
    /// shared positions simply fail the guard; the head predicates rule
    /// that out for values coming from the matcher.
    fn guard(&self, values: &[Value]) -> Result<bool, EvalError> {
        for (first, other) in &self.joins {
            match (extract(values, first), extract(values, other)) {
                (Some(a), Some(b)) if a == b => {}
                _ => return Ok(false),
            }
        }
        match &self.guard {
            None => Ok(true),
            Some(expr) => {
                let Some(binding) = self.binding(values) else {
                    return Ok(false);
                };
                eval_guard_expr(expr, &binding)
            }
        }
    }

    fn body(&self, values: &[Value]) -> Result<Vec<Value>, EvalError> {
        let binding = self.binding(values).ok_or_else(|| {
            EvalError::type_mismatch("matched values do not fit the head patterns")
        })?;
        self.body
            .iter()
            .map(|expr| eval_expr(expr, &binding))
            .collect()
    }
}

fn collect_occurrences(
    pattern: &Pattern,
    position: usize,
    path: &mut Vec<usize>,
    bindings: &mut Vec<(String, Occurrence)>,
    joins: &mut Vec<(Occurrence, Occurrence)>,
) {
    match pattern {
        Pattern::Lit(..) => {}
        Pattern::Var(name, _) => {
            let here = (position, path.clone());
            match bindings.iter().find(|(bound, _)| bound == name) {
                Some((_, first)) => joins.push((first.clone(), here)),
                None => bindings.push((name.clone(), here)),
            }
        }
        Pattern::Tuple(items, _) => {
            for (i, item) in items.iter().enumerate() {
                path.push(i);
                collect_occurrences(item, position, path, bindings, joins);
                path.pop();
            }
        }
    }
}

fn extract<'v>(values: &'v [Value], occurrence: &Occurrence) -> Option<&'v Value> {
    let (position, path) = occurrence;
    let mut value = values.get(*position)?;
    for &index in path {
        match value {
            Value::Tup(items) => value = items.get(index)?,
            _ => return None,
        }
    }
    Some(value)
}
