//! A nondeterministic multiset-rewriting reference semantics and the
//! per-step soundness check of the executor against it.
//!
//! In the reference semantics a program acts on a plain multiset of
//! values: any rule of the program may fire on any injective choice of
//! values satisfying its head predicates and guard, consuming the
//! removed-head values and adding the body output. [`abstract_steps`]
//! enumerates every state reachable in exactly one such firing; brute
//! force, intended for small states.
//!
//! [`abstract_r`] projects an execution state down to that multiset
//! view: all store values plus the not-yet-activated query values.
//! [`check_soundness`] then validates one root-level engine step: its
//! abstraction must be unchanged (bookkeeping only) or reachable by a
//! single firing. Running it on every step of a run is an executable
//! form of the executor's soundness argument.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::program::{EvalError, Program, Rule};
use crate::state::ExecState;
use crate::value::Value;

/// A multiset of values: order-free, multiplicity-aware.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct AbstractState {
    counts: BTreeMap<Value, usize>,
}

impl AbstractState {
    pub fn new() -> AbstractState {
        AbstractState::default()
    }

    pub fn insert(&mut self, value: Value) {
        *self.counts.entry(value).or_insert(0) += 1;
    }

    /// Removes one occurrence; false if the value is absent.
    pub fn remove_one(&mut self, value: &Value) -> bool {
        match self.counts.get_mut(value) {
            Some(count) if *count > 1 => {
                *count -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(value);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, value: &Value) -> usize {
        self.counts.get(value).copied().unwrap_or(0)
    }

    /// Total number of values, multiplicities included.
    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct values with their multiplicities, in value order.
    pub fn counts(&self) -> impl Iterator<Item = (&Value, usize)> {
        self.counts.iter().map(|(v, &c)| (v, c))
    }

    /// All values, duplicates repeated, in value order.
    pub fn to_sorted_values(&self) -> Vec<Value> {
        let mut out = Vec::with_capacity(self.len());
        for (value, count) in self.counts() {
            for _ in 0..count {
                out.push(value.clone());
            }
        }
        out
    }

    /// Multiset difference `self − other`, saturating at zero.
    pub fn minus(&self, other: &AbstractState) -> AbstractState {
        let mut result = self.clone();
        for (value, count) in other.counts() {
            for _ in 0..count {
                if !result.remove_one(value) {
                    break;
                }
            }
        }
        result
    }
}

impl FromIterator<Value> for AbstractState {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        let mut state = AbstractState::new();
        for value in iter {
            state.insert(value);
        }
        state
    }
}

impl fmt::Display for AbstractState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, value) in self.to_sorted_values().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{value}")?;
        }
        write!(f, "}}")
    }
}

/// Budget for the brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Complete candidate assignments evaluated per [`abstract_steps`]
    /// call before giving up.
    pub max_assignments: u64,
}

pub const DEFAULT_MAX_ASSIGNMENTS: u64 = 10_000;

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
        }
    }
}

/// Errors from the oracle. A budget error means "unverified", never a
/// soundness verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration budget of {cap} candidate assignments exceeded")]
    BudgetExceeded { cap: u64 },
    #[error("{0}")]
    Eval(#[from] EvalError),
}

/// Projects an execution state to its multiset view: every store value
/// plus every not-yet-activated query value. Activated query entries
/// contribute nothing beyond their store presence.
pub fn abstract_r(state: &ExecState) -> AbstractState {
    let mut multiset: AbstractState = state.store().values().cloned().collect();
    for entry in state.query() {
        if entry.id.is_none() {
            multiset.insert(entry.value.clone());
        }
    }
    multiset
}

/// All states reachable from `state` by exactly one rule firing of any
/// rule in the program. Exhaustive over injective value choices; two
/// choices picking equal values count as the same firing.
pub fn abstract_steps(
    program: &Program,
    state: &AbstractState,
    config: &OracleConfig,
) -> Result<BTreeSet<AbstractState>, OracleError> {
    let mut successors = BTreeSet::new();
    let mut budget = Budget {
        remaining: config.max_assignments,
        cap: config.max_assignments,
    };
    for rule in program.rules() {
        enumerate_rule_firings(rule, state, &mut budget, &mut successors)?;
    }
    Ok(successors)
}

struct Budget {
    remaining: u64,
    cap: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<(), OracleError> {
        if self.remaining == 0 {
            return Err(OracleError::BudgetExceeded { cap: self.cap });
        }
        self.remaining -= 1;
        Ok(())
    }
}

fn enumerate_rule_firings(
    rule: &Rule,
    state: &AbstractState,
    budget: &mut Budget,
    successors: &mut BTreeSet<AbstractState>,
) -> Result<(), OracleError> {
    let arity = rule.arity();
    let mut pool: Vec<(Value, usize)> = state.counts().map(|(v, c)| (v.clone(), c)).collect();
    let mut chosen: Vec<Value> = Vec::with_capacity(arity);
    choose_slot(rule, state, &mut pool, &mut chosen, budget, successors)
}

/// Assigns head positions left to right, drawing values from the pool
/// with remaining multiplicity; equal values are never distinguished.
fn choose_slot(
    rule: &Rule,
    state: &AbstractState,
    pool: &mut Vec<(Value, usize)>,
    chosen: &mut Vec<Value>,
    budget: &mut Budget,
    successors: &mut BTreeSet<AbstractState>,
) -> Result<(), OracleError> {
    let slot = chosen.len();
    if slot == rule.arity() {
        budget.spend()?;
        if (rule.guard())(chosen)? {
            let mut successor = state.clone();
            for removed in &chosen[rule.kept_len()..] {
                let present = successor.remove_one(removed);
                debug_assert!(present, "removed values were drawn from the state");
            }
            for produced in (rule.body())(chosen)? {
                successor.insert(produced);
            }
            successors.insert(successor);
        }
        return Ok(());
    }
    let predicate = &rule.head()[slot];
    for i in 0..pool.len() {
        if pool[i].1 == 0 || !predicate(&pool[i].0) {
            continue;
        }
        pool[i].1 -= 1;
        chosen.push(pool[i].0.clone());
        let result = choose_slot(rule, state, pool, chosen, budget, successors);
        chosen.pop();
        pool[i].1 += 1;
        result?;
    }
    Ok(())
}

/// True iff `target` is reachable from `from` within `depth` firings
/// (zero firings included, so `reachable(p, s, s, _)` always holds).
/// Breadth-first; monotone in `depth`.
pub fn reachable(
    program: &Program,
    from: &AbstractState,
    target: &AbstractState,
    depth: u32,
    config: &OracleConfig,
) -> Result<bool, OracleError> {
    if from == target {
        return Ok(true);
    }
    let mut visited = BTreeSet::from([from.clone()]);
    let mut frontier = vec![from.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for state in &frontier {
            for successor in abstract_steps(program, state, config)? {
                if successor == *target {
                    return Ok(true);
                }
                if visited.insert(successor.clone()) {
                    next.push(successor);
                }
            }
        }
        if next.is_empty() {
            return Ok(false);
        }
        frontier = next;
    }
    Ok(false)
}

/// Why a step passed the soundness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassKind {
    /// The abstraction did not change: bookkeeping only.
    Reflexive,
    /// The abstraction moved by exactly one rule firing.
    Apply,
}

/// A failed check, with both abstractions and their multiset diff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessFailure {
    pub before: AbstractState,
    pub after: AbstractState,
    /// Values in `after` but not `before`.
    pub added: AbstractState,
    /// Values in `before` but not `after`.
    pub removed: AbstractState,
}

impl fmt::Display for SoundnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step is not a single firing: {} -> {} (added {}, removed {})",
            self.before, self.after, self.added, self.removed,
        )
    }
}

/// Verdict of a per-step soundness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass(PassKind),
    Fail(Box<SoundnessFailure>),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass(_))
    }
}

/// Checks one root-level engine step `before -> after`: PASS if the two
/// abstractions are equal or the second is reachable by exactly one
/// firing; FAIL otherwise, with the diff attached.
pub fn check_soundness(
    program: &Program,
    before: &ExecState,
    after: &ExecState,
    config: &OracleConfig,
) -> Result<Verdict, OracleError> {
    let abstract_before = abstract_r(before);
    let abstract_after = abstract_r(after);
    if abstract_before == abstract_after {
        return Ok(Verdict::Pass(PassKind::Reflexive));
    }
    let successors = abstract_steps(program, &abstract_before, config)?;
    if successors.contains(&abstract_after) {
        Ok(Verdict::Pass(PassKind::Apply))
    } else {
        Ok(Verdict::Fail(Box::new(SoundnessFailure {
            added: abstract_after.minus(&abstract_before),
            removed: abstract_before.minus(&abstract_after),
            before: abstract_before,
            after: abstract_after,
        })))
    }
}
