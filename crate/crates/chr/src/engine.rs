//! The executor: applies one rule to a state, traverses composites top
//! to bottom, and drives a program to quiescence.
//!
//! [`compile`] folds a [`Program`] into an [`Executor`] whose step
//! function takes an `is_last` flag and a state and reports whether a
//! rule fired. [`run`] repeats root-level steps (with `is_last` true)
//! until the query empties, guarded by a step budget since programs may
//! diverge.
//!
//! Every observable action (activation, cleanup of dead entries,
//! dropping the active value, firing a rule) is emitted as a
//! [`TraceEvent`]. Traces serialize one event per line and are the
//! replay/audit format; tracing can be switched off for tight loops.

use serde_json::json;
use thiserror::Error;

use crate::matcher::find_match;
use crate::program::{fold, EvalError, Program, Rule};
use crate::state::{ExecState, Id, StateError};
use crate::value::Value;

/// Outcome of one step: the successor state and whether a rule fired.
/// When `fired` is true, exactly one firing record was added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub state: ExecState,
    pub fired: bool,
}

/// One observable engine action.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: TraceEventKind,
    /// State after the action, present when snapshots are enabled.
    pub state: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEventKind {
    /// The top of the query was activated under a fresh identifier.
    Activate { id: Id, value: Value },
    /// A dead (previously removed) entry was popped during cleanup.
    PopDead { id: Id },
    /// The live active value had no applicable rule and left the query.
    Drop { id: Id },
    /// A rule fired. `matched` lists the identifiers in head order;
    /// `removed` is its suffix of removed-head identifiers; `body` is
    /// what the rule queued.
    Apply {
        rule: String,
        matched: Vec<Id>,
        removed: Vec<Id>,
        body: Vec<Value>,
    },
}

impl TraceEvent {
    /// Canonical JSON object; keys serialize sorted, values rendered in
    /// canonical text. One such object per line forms a trace file.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = match &self.kind {
            TraceEventKind::Activate { id, value } => json!({
                "kind": "activate",
                "id": id,
                "value": value.render(),
            }),
            TraceEventKind::PopDead { id } => json!({
                "kind": "pop_dead",
                "id": id,
            }),
            TraceEventKind::Drop { id } => json!({
                "kind": "drop",
                "id": id,
            }),
            TraceEventKind::Apply {
                rule,
                matched,
                removed,
                body,
            } => json!({
                "kind": "apply",
                "rule": rule,
                "matched": matched,
                "removed": removed,
                "body": body.iter().map(|v| v.render()).collect::<Vec<_>>(),
            }),
        };
        let map = obj.as_object_mut().expect("event json is an object");
        map.insert("step".to_string(), json!(self.step));
        if let Some(state) = &self.state {
            map.insert("state".to_string(), state.clone());
        }
        obj
    }
}

/// Trace switches. Snapshots embed the post-event state in every event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceConfig {
    pub enabled: bool,
    pub snapshots: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            enabled: true,
            snapshots: false,
        }
    }
}

/// Collects trace events during execution.
#[derive(Debug, Clone)]
pub struct Tracer {
    config: TraceConfig,
    events: Vec<TraceEvent>,
    next_step: u64,
}

impl Tracer {
    pub fn new(config: TraceConfig) -> Tracer {
        Tracer {
            config,
            events: Vec::new(),
            next_step: 0,
        }
    }

    /// A tracer that records nothing.
    pub fn off() -> Tracer {
        Tracer::new(TraceConfig {
            enabled: false,
            snapshots: false,
        })
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<TraceEvent> {
        self.events
    }

    fn emit(&mut self, kind: TraceEventKind, state_after: &ExecState) {
        if !self.config.enabled {
            return;
        }
        let state = self.config.snapshots.then(|| state_after.snapshot());
        self.events.push(TraceEvent {
            step: self.next_step,
            kind,
            state,
        });
        self.next_step += 1;
    }
}

/// An intentional engine defect for sensitivity testing. Compiling a
/// program with a mutant yields an executor that deviates from the real
/// semantics in exactly one way; the golden traces and the semantics
/// oracle are expected to reject each of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutant {
    /// Do not record firings in the history.
    SkipHistory,
    /// On firing, also remove the first kept value from the store.
    RemoveKept,
    /// Queue the body values in reversed order.
    ReverseBodyPush,
}

/// Errors during execution.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("step budget of {} root steps exhausted with the query still non-empty", .0.max_steps)]
    StepBudget(Box<ExhaustedRun>),
    /// State operations only fail on inputs the algorithms never produce,
    /// so this indicates an engine defect, not a user error.
    #[error("engine invariant violated: {0}")]
    Internal(#[from] StateError),
}

/// What a budget-exhausted run had computed so far.
#[derive(Debug)]
pub struct ExhaustedRun {
    pub max_steps: u64,
    pub state: ExecState,
    pub trace: Vec<TraceEvent>,
}

/// Applies one rule to the state.
///
/// First the cleanup loop: with an empty query the step reports
/// `fired = false`; an unactivated top is activated; a dead top is
/// popped and the loop repeats. Then the live active value is matched.
/// Without a matching, the active value is dropped when this rule is
/// the last of the program. With one, the firing is recorded, the
/// removed-head values leave the store and the body output is queued.
pub fn rule_step(
    rule: &Rule,
    is_last: bool,
    state: ExecState,
    tracer: &mut Tracer,
) -> Result<StepResult, EngineError> {
    rule_step_inner(rule, None, is_last, state, tracer)
}

fn rule_step_inner(
    rule: &Rule,
    mutant: Option<Mutant>,
    is_last: bool,
    mut state: ExecState,
    tracer: &mut Tracer,
) -> Result<StepResult, EngineError> {
    let active_id = loop {
        let top = match state.query_top() {
            None => {
                return Ok(StepResult {
                    state,
                    fired: false,
                })
            }
            Some(entry) => entry,
        };
        let id = match top.id {
            None => {
                let id = state.activate()?;
                let value = state.query_top().expect("just activated").value.clone();
                tracer.emit(TraceEventKind::Activate { id, value }, &state);
                id
            }
            Some(id) => id,
        };
        if state.alive(id) {
            break id;
        }
        state.pop_query()?;
        tracer.emit(TraceEventKind::PopDead { id }, &state);
    };

    let matching = {
        let active_value = &state.query_top().expect("loop left a live top").value;
        find_match(
            rule.name(),
            rule.head(),
            rule.guard(),
            active_id,
            active_value,
            state.store(),
            state.history(),
        )?
    };

    let matching = match matching {
        None => {
            if is_last {
                state.pop_query()?;
                tracer.emit(TraceEventKind::Drop { id: active_id }, &state);
            }
            return Ok(StepResult {
                state,
                fired: false,
            });
        }
        Some(matching) => matching,
    };

    let ids = matching.ids();
    let values = matching.values();
    if mutant != Some(Mutant::SkipHistory) {
        state.to_history(rule.name(), ids.clone());
    }
    let mut removed_ids = ids[rule.kept_len()..].to_vec();
    if mutant == Some(Mutant::RemoveKept) && rule.kept_len() > 0 {
        removed_ids.push(ids[0]);
    }
    state.remove(&removed_ids)?;
    let mut body_values = (rule.body())(&values)?;
    if mutant == Some(Mutant::ReverseBodyPush) {
        body_values.reverse();
    }
    state.push_query(&body_values);
    tracer.emit(
        TraceEventKind::Apply {
            rule: rule.name().to_string(),
            matched: ids,
            removed: removed_ids,
            body: body_values,
        },
        &state,
    );
    Ok(StepResult { state, fired: true })
}

/// Traverses the children of a composite top to bottom, threading the
/// state through. Returns at the first child that fires; only the last
/// child of the last composite sees `is_last = true`.
pub fn compose_step(
    children: &[Executor],
    is_last: bool,
    mut state: ExecState,
    tracer: &mut Tracer,
) -> Result<StepResult, EngineError> {
    debug_assert!(!children.is_empty(), "composites have at least one child");
    let n = children.len();
    for (i, child) in children.iter().enumerate() {
        let result = child.step(i + 1 == n && is_last, state, tracer)?;
        state = result.state;
        if result.fired {
            return Ok(StepResult { state, fired: true });
        }
    }
    Ok(StepResult {
        state,
        fired: false,
    })
}

/// A compiled program: a step function from `(is_last, state)` to a
/// successor state and a fired flag, emitting trace events as it goes.
#[derive(Debug, Clone)]
pub struct Executor {
    node: ExecNode,
}

#[derive(Debug, Clone)]
enum ExecNode {
    Rule(Rule, Option<Mutant>),
    Composite(Vec<Executor>),
}

impl Executor {
    pub fn step(
        &self,
        is_last: bool,
        state: ExecState,
        tracer: &mut Tracer,
    ) -> Result<StepResult, EngineError> {
        match &self.node {
            ExecNode::Rule(rule, mutant) => rule_step_inner(rule, *mutant, is_last, state, tracer),
            ExecNode::Composite(children) => compose_step(children, is_last, state, tracer),
        }
    }
}

/// Folds a program into its executor: rule nodes become rule steps,
/// composites become the top-to-bottom traversal of their children.
pub fn compile(program: &Program) -> Executor {
    compile_inner(program, None)
}

/// Like [`compile`] but with one deliberate defect; see [`Mutant`].
pub fn compile_with_mutant(program: &Program, mutant: Mutant) -> Executor {
    compile_inner(program, Some(mutant))
}

fn compile_inner(program: &Program, mutant: Option<Mutant>) -> Executor {
    fold(
        program,
        &mut |rule| Executor {
            node: ExecNode::Rule(rule.clone(), mutant),
        },
        &mut |children| Executor {
            node: ExecNode::Composite(children),
        },
    )
}

/// Knobs for [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum number of root-level steps before the run aborts.
    pub max_steps: u64,
    pub trace: TraceConfig,
}

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_steps: DEFAULT_MAX_STEPS,
            trace: TraceConfig::default(),
        }
    }
}

/// A finished run: final state and the trace that led there.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: ExecState,
    pub trace: Vec<TraceEvent>,
}

/// A stepwise execution, for drivers that want to observe every
/// root-level step (the soundness checker does).
#[derive(Debug)]
pub struct Execution {
    executor: Executor,
    state: ExecState,
    tracer: Tracer,
    max_steps: u64,
    steps_taken: u64,
}

impl Execution {
    pub fn new(program: &Program, query: &[Value], options: &RunOptions) -> Execution {
        Execution::with_executor(compile(program), query, options)
    }

    /// Starts from an explicit executor; used to run mutants against the
    /// same harness as the real engine.
    pub fn with_executor(executor: Executor, query: &[Value], options: &RunOptions) -> Execution {
        Execution {
            executor,
            state: ExecState::initial(query),
            tracer: Tracer::new(options.trace),
            max_steps: options.max_steps,
            steps_taken: 0,
        }
    }

    /// True once the query is empty.
    pub fn finished(&self) -> bool {
        self.state.query().is_empty()
    }

    pub fn state(&self) -> &ExecState {
        &self.state
    }

    pub fn events(&self) -> &[TraceEvent] {
        self.tracer.events()
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    /// Performs one root-level step (`is_last` fixed to true). Returns
    /// whether a rule fired; a no-op on a finished execution. Exceeding
    /// the step budget is an error carrying state and trace so far.
    /// After an evaluation error the execution is spent and must be
    /// discarded.
    pub fn root_step(&mut self) -> Result<bool, EngineError> {
        if self.finished() {
            return Ok(false);
        }
        if self.steps_taken >= self.max_steps {
            return Err(EngineError::StepBudget(Box::new(ExhaustedRun {
                max_steps: self.max_steps,
                state: self.state.clone(),
                trace: self.tracer.events().to_vec(),
            })));
        }
        self.steps_taken += 1;
        let state = std::mem::take(&mut self.state);
        let result = self.executor.step(true, state, &mut self.tracer)?;
        self.state = result.state;
        Ok(result.fired)
    }

    pub fn into_outcome(self) -> RunOutcome {
        RunOutcome {
            state: self.state,
            trace: self.tracer.into_events(),
        }
    }
}

/// Runs the program on the query until the query empties: the initial
/// state queues the values with the first on top, then root-level steps
/// repeat within the step budget.
pub fn run(
    program: &Program,
    query: &[Value],
    options: &RunOptions,
) -> Result<RunOutcome, EngineError> {
    let mut execution = Execution::new(program, query, options);
    while !execution.finished() {
        execution.root_step()?;
    }
    Ok(execution.into_outcome())
}
