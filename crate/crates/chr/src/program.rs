//! The program algebra: single rules, composites of programs, and the
//! structural fold that interprets a program in any target domain.
//!
//! A [`Rule`] carries per-value head predicates (kept and removed), a
//! guard over the full matched sequence and a body producing new values.
//! Guards and bodies are opaque host functions; the text dialect in
//! [`crate::textlang`] compiles down to them, and they can equally be
//! written by hand as closures.
//!
//! A [`Program`] is either one rule or an ordered composite of programs.
//! Consumers never walk the tree directly: [`fold`] applies a rule
//! algebra and a composition algebra by structural recursion, which is
//! how the executor in [`crate::engine`] is produced.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::{Position, Value};

/// Per-value head test. Total: it may reject, never fail.
pub type HeadPredicate = Arc<dyn Fn(&Value) -> bool + Send + Sync>;

/// Guard over the matched values, in head order (kept then removed).
pub type GuardFn = Arc<dyn Fn(&[Value]) -> Result<bool, EvalError> + Send + Sync>;

/// Body over the matched values; its output is queued when the rule fires.
pub type BodyFn = Arc<dyn Fn(&[Value]) -> Result<Vec<Value>, EvalError> + Send + Sync>;

/// A guard or body evaluation failure. Positions are attached when the
/// failing code came from the text dialect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub position: Option<Position>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    Overflow,
    TypeMismatch(String),
    UnboundVariable(String),
}

impl EvalError {
    pub fn new(kind: EvalErrorKind, position: Option<Position>) -> Self {
        EvalError { kind, position }
    }

    pub fn overflow() -> Self {
        EvalError::new(EvalErrorKind::Overflow, None)
    }

    pub fn type_mismatch(message: impl Into<String>) -> Self {
        EvalError::new(EvalErrorKind::TypeMismatch(message.into()), None)
    }

    pub fn at(mut self, position: Position) -> Self {
        self.position = Some(position);
        self
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EvalErrorKind::DivisionByZero => write!(f, "division by zero")?,
            EvalErrorKind::Overflow => write!(f, "integer overflow")?,
            EvalErrorKind::TypeMismatch(msg) => write!(f, "type mismatch: {msg}")?,
            EvalErrorKind::UnboundVariable(name) => write!(f, "variable {name} is not bound")?,
        }
        if let Some(pos) = self.position {
            write!(f, " at {pos}")?;
        }
        Ok(())
    }
}

impl std::error::Error for EvalError {}

/// Errors from program construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("rule {name:?} has an empty head: kept and removed cannot both be empty")]
    EmptyHead { name: String },
    #[error("duplicate rule name {name:?} within one program")]
    DuplicateRuleName { name: String },
    #[error("cannot compose an empty sequence of programs")]
    EmptyComposition,
}

/// A named rewrite rule.
///
/// Head predicates screen individual values; the guard sees the whole
/// matched sequence (kept values first, removed after) and the body maps
/// it to the values queued on firing. Guard and body must be
/// deterministic and side-effect-free; they are shared across concurrent
/// executions.
#[derive(Clone)]
pub struct Rule {
    name: String,
    kept: Vec<HeadPredicate>,
    removed: Vec<HeadPredicate>,
    head: Vec<HeadPredicate>,
    guard: GuardFn,
    body: BodyFn,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        kept: Vec<HeadPredicate>,
        removed: Vec<HeadPredicate>,
        guard: GuardFn,
        body: BodyFn,
    ) -> Result<Rule, ProgramError> {
        let name = name.into();
        if kept.is_empty() && removed.is_empty() {
            return Err(ProgramError::EmptyHead { name });
        }
        let head = kept.iter().chain(removed.iter()).cloned().collect();
        Ok(Rule {
            name,
            kept,
            removed,
            head,
            guard,
            body,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kept(&self) -> &[HeadPredicate] {
        &self.kept
    }

    pub fn removed(&self) -> &[HeadPredicate] {
        &self.removed
    }

    /// Kept and removed head predicates concatenated, in match order.
    pub fn head(&self) -> &[HeadPredicate] {
        &self.head
    }

    pub fn kept_len(&self) -> usize {
        self.kept.len()
    }

    /// Number of head positions, `|kept| + |removed|`.
    pub fn arity(&self) -> usize {
        self.head.len()
    }

    pub fn guard(&self) -> &GuardFn {
        &self.guard
    }

    pub fn body(&self) -> &BodyFn {
        &self.body
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("name", &self.name)
            .field("kept", &self.kept.len())
            .field("removed", &self.removed.len())
            .finish()
    }
}

/// A program: one rule or an ordered composite.
///
/// Construction enforces that rule names are pairwise distinct, which
/// keeps firing records unambiguous. Composites are n-ary and flat;
/// composing composites splices their children in order.
#[derive(Debug, Clone)]
pub struct Program {
    node: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Rule(Rule),
    Composite(Vec<Program>),
}

impl From<Rule> for Program {
    fn from(rule: Rule) -> Program {
        Program {
            node: Node::Rule(rule),
        }
    }
}

/// Builds a single-rule program; fails if both head parts are empty.
pub fn make_rule(
    name: impl Into<String>,
    kept: Vec<HeadPredicate>,
    removed: Vec<HeadPredicate>,
    guard: GuardFn,
    body: BodyFn,
) -> Result<Program, ProgramError> {
    Rule::new(name, kept, removed, guard, body).map(Program::from)
}

/// Composes programs left to right.
///
/// A singleton sequence returns its sole element unchanged; longer
/// sequences form a composite, splicing children that are themselves
/// composites. Rule names must stay pairwise distinct across the result.
pub fn compose_programs(programs: Vec<Program>) -> Result<Program, ProgramError> {
    if programs.is_empty() {
        return Err(ProgramError::EmptyComposition);
    }
    if programs.len() == 1 {
        return Ok(programs.into_iter().next().unwrap());
    }
    let mut children = Vec::with_capacity(programs.len());
    for program in programs {
        match program.node {
            Node::Composite(grandchildren) => children.extend(grandchildren),
            node => children.push(Program { node }),
        }
    }
    let composite = Program {
        node: Node::Composite(children),
    };
    let mut seen = BTreeSet::new();
    for rule in composite.rules() {
        if !seen.insert(rule.name().to_string()) {
            return Err(ProgramError::DuplicateRuleName {
                name: rule.name().to_string(),
            });
        }
    }
    Ok(composite)
}

/// Folds a program into a domain `D` by structural recursion: the rule
/// algebra interprets single rules, the composition algebra combines the
/// already-interpreted children of a composite, left to right.
pub fn fold<'p, D, R, N>(program: &'p Program, rule_alg: &mut R, comp_alg: &mut N) -> D
where
    R: FnMut(&'p Rule) -> D,
    N: FnMut(Vec<D>) -> D,
{
    match &program.node {
        Node::Rule(rule) => rule_alg(rule),
        Node::Composite(children) => {
            let folded = children
                .iter()
                .map(|child| fold(child, rule_alg, comp_alg))
                .collect();
            comp_alg(folded)
        }
    }
}

/// Shape of a program with the opaque functions erased; handy for
/// structural assertions and debugging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramShape {
    Rule {
        name: String,
        kept: usize,
        removed: usize,
    },
    Composite(Vec<ProgramShape>),
}

impl Program {
    /// All rules in textual (left-to-right) order.
    pub fn rules(&self) -> Vec<&Rule> {
        fold(self, &mut |rule| vec![rule], &mut |children| {
            children.into_iter().flatten().collect()
        })
    }

    pub fn shape(&self) -> ProgramShape {
        fold(
            self,
            &mut |rule| ProgramShape::Rule {
                name: rule.name().to_string(),
                kept: rule.kept_len(),
                removed: rule.arity() - rule.kept_len(),
            },
            &mut ProgramShape::Composite,
        )
    }
}

/// Head predicate accepting any value.
pub fn any_value() -> HeadPredicate {
    Arc::new(|_| true)
}

/// Guard that always holds.
pub fn always() -> GuardFn {
    Arc::new(|_| Ok(true))
}

/// Body producing no values.
pub fn empty_body() -> BodyFn {
    Arc::new(|_| Ok(Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;

    fn int_pred(f: impl Fn(i64) -> bool + Send + Sync + 'static) -> HeadPredicate {
        Arc::new(move |v: &Value| v.as_int().map(&f).unwrap_or(false))
    }

    #[test]
    fn programs_and_runtime_types_cross_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Value>();
        assert_send_sync::<Rule>();
        assert_send_sync::<Program>();
        assert_send_sync::<crate::state::ExecState>();
        assert_send_sync::<crate::engine::Executor>();

        // one compiled program, concurrent independent executions
        let gcd = std::sync::Arc::new(crate::builtins::gcd());
        let handles: Vec<_> = [(6, 9), (12, 18), (35, 14)]
            .into_iter()
            .map(|(a, b)| {
                let gcd = gcd.clone();
                std::thread::spawn(move || {
                    let query = [Value::Int(a), Value::Int(b)];
                    crate::engine::run(&gcd, &query, &Default::default())
                        .unwrap()
                        .state
                })
            })
            .collect();
        let stores: Vec<String> = handles
            .into_iter()
            .map(|h| crate::state::format_store(&h.join().unwrap()))
            .collect();
        assert_eq!(stores, ["{3}", "{6}", "{7}"]);
    }

    #[test]
    fn make_rule_rejects_empty_heads() {
        let err = make_rule("bad", vec![], vec![], always(), empty_body()).unwrap_err();
        assert_eq!(
            err,
            ProgramError::EmptyHead {
                name: "bad".to_string()
            }
        );
    }

    #[test]
    fn make_rule_builds_rule_nodes() {
        let zero = make_rule(
            "zero",
            vec![],
            vec![int_pred(|n| n == 0)],
            always(),
            empty_body(),
        )
        .unwrap();
        assert_eq!(
            zero.shape(),
            ProgramShape::Rule {
                name: "zero".to_string(),
                kept: 0,
                removed: 1
            }
        );
    }

    #[test]
    fn compose_of_one_is_identity() {
        let p = make_rule("only", vec![any_value()], vec![], always(), empty_body()).unwrap();
        let shape = p.shape();
        let composed = compose_programs(vec![p]).unwrap();
        assert_eq!(composed.shape(), shape);
    }

    #[test]
    fn compose_rejects_empty_sequence() {
        assert_eq!(
            compose_programs(vec![]).unwrap_err(),
            ProgramError::EmptyComposition
        );
    }

    #[test]
    fn compose_flattens_nested_composites() {
        let rule = |name: &str| {
            make_rule(name, vec![any_value()], vec![], always(), empty_body()).unwrap()
        };
        let inner = compose_programs(vec![rule("a"), rule("b")]).unwrap();
        let outer = compose_programs(vec![inner, rule("c")]).unwrap();
        match outer.shape() {
            ProgramShape::Composite(children) => {
                let names: Vec<_> = children
                    .iter()
                    .map(|c| match c {
                        ProgramShape::Rule { name, .. } => name.clone(),
                        other => panic!("unexpected nested composite {other:?}"),
                    })
                    .collect();
                assert_eq!(names, ["a", "b", "c"]);
            }
            other => panic!("expected composite, got {other:?}"),
        }
    }

    #[test]
    fn compose_rejects_duplicate_rule_names() {
        let rule = |name: &str| {
            make_rule(name, vec![any_value()], vec![], always(), empty_body()).unwrap()
        };
        assert_eq!(
            compose_programs(vec![rule("dup"), rule("dup")]).unwrap_err(),
            ProgramError::DuplicateRuleName {
                name: "dup".to_string()
            }
        );
    }

    #[test]
    fn fold_counts_rules_of_gcd() {
        let gcd = builtins::gcd();
        let count = fold(&gcd, &mut |_| 1usize, &mut |children| {
            children.into_iter().sum()
        });
        // independent count by direct walk over the rule list
        assert_eq!(count, gcd.rules().len());
        assert_eq!(count, 2);
    }

    #[test]
    fn fold_visits_rules_left_to_right() {
        let rule = |name: &str| {
            make_rule(name, vec![any_value()], vec![], always(), empty_body()).unwrap()
        };
        let program = compose_programs(vec![
            rule("first"),
            compose_programs(vec![rule("second"), rule("third")]).unwrap(),
            rule("fourth"),
        ])
        .unwrap();
        let mut seen = Vec::new();
        fold(
            &program,
            &mut |r| seen.push(r.name().to_string()),
            &mut |_children| (),
        );
        assert_eq!(seen, ["first", "second", "third", "fourth"]);
    }

    #[test]
    fn fold_with_constructors_rebuilds_the_program() {
        let gcd = builtins::gcd();
        let rebuilt = fold(
            &gcd,
            &mut |rule| Program::from(rule.clone()),
            &mut |children| compose_programs(children).expect("children compose"),
        );
        assert_eq!(rebuilt.shape(), gcd.shape());
    }
}
