//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`). Golden final states come from the
//! worked gcd and transitive-closure runs; derived expectations come
//! from independent oracles implemented here (Euclid fold, exhaustive
//! assignment enumeration, the multiset-rewriting semantics).

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use chr::builtins;
use chr::engine::{
    compile, compile_with_mutant, run, Execution, Executor, Mutant, RunOptions, TraceConfig,
    TraceEvent, TraceEventKind,
};
use chr::matcher::find_match;
use chr::oracle::{check_soundness, OracleConfig, Verdict};
use chr::program::{GuardFn, HeadPredicate, Program};
use chr::state::{format_store, ExecState, HistoryRecord, Id};
use chr::textlang::compile_source;
use chr::value::{parse_values, Value};

fn int(n: i64) -> Value {
    Value::Int(n)
}

fn ints(ns: &[i64]) -> Vec<Value> {
    ns.iter().copied().map(Value::Int).collect()
}

fn quiet() -> RunOptions {
    RunOptions {
        trace: TraceConfig {
            enabled: false,
            snapshots: false,
        },
        ..RunOptions::default()
    }
}

fn history_of(pairs: &[(&str, &[Id])]) -> BTreeSet<HistoryRecord> {
    pairs
        .iter()
        .map(|(rule, ids)| HistoryRecord::new(*rule, ids.to_vec()))
        .collect()
}

/// Golden check for gcd on [6, 9]; parametrized over the executor so the
/// mutation criterion can reuse it.
fn gcd_golden_check(executor: Executor) -> Result<(), String> {
    let mut execution = Execution::with_executor(executor, &ints(&[6, 9]), &RunOptions::default());
    while !execution.finished() {
        execution.root_step().map_err(|e| e.to_string())?;
    }
    let state = execution.state();
    if !state.query().is_empty() {
        return Err("query not drained".to_string());
    }
    let store: Vec<(Id, Value)> = state.store().iter().map(|(k, v)| (*k, v.clone())).collect();
    if store != [(3, int(3))] {
        return Err(format!("store is {store:?}, expected {{(3, 3)}}"));
    }
    let expected = history_of(&[
        ("subtract", &[1, 2]),
        ("subtract", &[3, 1]),
        ("subtract", &[3, 4]),
        ("zero", &[5]),
    ]);
    if state.history() != &expected {
        return Err(format!("history is {:?}", state.history()));
    }
    if state.index() != 6 {
        return Err(format!("index is {}, expected 6", state.index()));
    }
    Ok(())
}

#[test]
fn criterion_1_gcd_golden_run() {
    gcd_golden_check(compile(&builtins::gcd())).unwrap();

    // timing on a warmed-up second run, traces on
    let gcd = builtins::gcd();
    run(&gcd, &ints(&[6, 9]), &RunOptions::default()).unwrap();
    let started = Instant::now();
    run(&gcd, &ints(&[6, 9]), &RunOptions::default()).unwrap();
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_millis(1),
        "run took {elapsed:?}, budget is 1 ms"
    );
    eprintln!("[criterion 1] PASS: gcd [6, 9] reaches store {{3}}, the four known firings, index 6, in {elapsed:?}");
}

/// Golden check for the transitive-closure demo; one firing only.
fn trans_golden_check(executor: Executor) -> Result<(), String> {
    let query = parse_values("(a,b), (b,c)").expect("query parses");
    // the real run takes four root steps; a tight budget keeps a
    // history-less mutant from grinding on forever
    let options = RunOptions {
        max_steps: 2_000,
        ..RunOptions::default()
    };
    let mut execution = Execution::with_executor(executor, &query, &options);
    while !execution.finished() {
        execution.root_step().map_err(|e| e.to_string())?;
    }
    let state = execution.state();
    let values: BTreeSet<String> = state.store().values().map(Value::render).collect();
    let expected_values: BTreeSet<String> = ["(a, b)", "(b, c)", "(a, c)"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if values != expected_values {
        return Err(format!("store values are {values:?}"));
    }
    if state.history() != &history_of(&[("trans", &[1, 2])]) {
        return Err(format!("history is {:?}", state.history()));
    }
    if state.index() != 4 {
        return Err(format!("index is {}, expected 4", state.index()));
    }
    let applies = execution
        .events()
        .iter()
        .filter(|event| matches!(event.kind, TraceEventKind::Apply { .. }))
        .count();
    if applies != 1 {
        return Err(format!("{applies} firings, expected exactly 1"));
    }
    Ok(())
}

#[test]
fn criterion_2_trans_golden_run() {
    trans_golden_check(compile(&builtins::trans())).unwrap();
    eprintln!("[criterion 2] PASS: trans [(a,b), (b,c)] adds exactly (a, c); the history blocks the second firing");
}

/// Independent oracle: Euclid's algorithm folded over the multiset.
fn euclid_gcd(values: &[i64]) -> i64 {
    fn gcd2(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd2(b, a % b)
        }
    }
    values.iter().copied().fold(0, gcd2)
}

/// The criterion-3 corpus, shared with criteria 4 and 6.
fn random_gcd_queries() -> Vec<Vec<i64>> {
    let mut rng = StdRng::seed_from_u64(0x6cd_2024);
    (0..200)
        .map(|_| {
            let len = rng.random_range(1..=6);
            (0..len).map(|_| rng.random_range(1..=1000)).collect()
        })
        .collect()
}

#[test]
fn criterion_3_gcd_functional_oracle() {
    let gcd = builtins::gcd();
    let queries = random_gcd_queries();
    let started = Instant::now();
    for query in &queries {
        let outcome = run(&gcd, &ints(query), &quiet()).unwrap();
        let store: Vec<&Value> = outcome.state.store().values().collect();
        assert_eq!(
            store,
            vec![&int(euclid_gcd(query))],
            "final store for {query:?} is not the gcd singleton"
        );
        assert!(outcome.state.query().is_empty());
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "200 runs took {elapsed:?}, budget is 1 s"
    );

    let zero_run = run(&gcd, &ints(&[0]), &quiet()).unwrap();
    assert!(zero_run.state.store().is_empty(), "zero rule must erase 0");

    eprintln!(
        "[criterion 3] PASS: 200 random multisets match the Euclid fold in {elapsed:?}; [0] drains to an empty store"
    );
}

/// Drives a run stepwise, checking every root step with the oracle.
fn sound_run(
    program: &Program,
    executor: Executor,
    query: &[Value],
    max_steps: u64,
) -> Result<u64, String> {
    let config = OracleConfig::default();
    let mut execution = Execution::with_executor(
        executor,
        query,
        &RunOptions {
            max_steps,
            ..quiet()
        },
    );
    let mut checked = 0;
    while !execution.finished() {
        let before = execution.state().clone();
        execution.root_step().map_err(|e| e.to_string())?;
        match check_soundness(program, &before, execution.state(), &config)
            .map_err(|e| e.to_string())?
        {
            Verdict::Pass(_) => checked += 1,
            Verdict::Fail(failure) => {
                return Err(format!("step {checked} unsound: {failure}"));
            }
        }
    }
    Ok(checked)
}

#[test]
fn criterion_4_every_step_is_sound() {
    let gcd = builtins::gcd();
    let trans = builtins::trans();
    let mut checked = 0;

    checked += sound_run(&gcd, compile(&gcd), &ints(&[6, 9]), 100_000).unwrap();
    checked += sound_run(
        &trans,
        compile(&trans),
        &parse_values("(a,b), (b,c)").unwrap(),
        100_000,
    )
    .unwrap();
    for query in &random_gcd_queries() {
        checked += sound_run(&gcd, compile(&gcd), &ints(query), 100_000).unwrap();
    }
    checked += sound_run(&gcd, compile(&gcd), &ints(&[0]), 100_000).unwrap();

    eprintln!("[criterion 4] PASS: {checked} root-level steps, each reflexive or one firing of the multiset semantics");
}

/// Test-local predicate and guard descriptions, evaluated by both the
/// matcher closures and the brute-force reference below.
#[derive(Debug, Clone, Copy)]
enum Pred {
    Any,
    Lit(i64),
    Gt(i64),
    Lt(i64),
}

impl Pred {
    fn eval(self, value: &Value) -> bool {
        match (self, value.as_int()) {
            (Pred::Any, _) => true,
            (Pred::Lit(k), Some(n)) => n == k,
            (Pred::Gt(k), Some(n)) => n > k,
            (Pred::Lt(k), Some(n)) => n < k,
            (_, None) => false,
        }
    }

    fn as_head_predicate(self) -> HeadPredicate {
        Arc::new(move |value: &Value| self.eval(value))
    }
}

#[derive(Debug, Clone, Copy)]
enum TestGuard {
    True,
    False,
    FirstLeLast,
    SumEven,
}

impl TestGuard {
    fn eval(self, values: &[Value]) -> bool {
        let as_ints: Vec<i64> = values.iter().filter_map(Value::as_int).collect();
        match self {
            TestGuard::True => true,
            TestGuard::False => false,
            TestGuard::FirstLeLast => as_ints.first() <= as_ints.last(),
            TestGuard::SumEven => as_ints.iter().sum::<i64>() % 2 == 0,
        }
    }

    fn as_guard(self) -> GuardFn {
        Arc::new(move |values: &[Value]| Ok(self.eval(values)))
    }
}

#[derive(Debug)]
struct MatchInstance {
    head: Vec<Pred>,
    guard: TestGuard,
    store: Vec<(Id, i64)>,
    active: (Id, i64),
    history: BTreeSet<HistoryRecord>,
}

fn random_instance(rng: &mut StdRng) -> MatchInstance {
    let store_len = rng.random_range(1..=6);
    let mut ids: Vec<Id> = Vec::new();
    while ids.len() < store_len {
        let id = rng.random_range(1..=40);
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    let store: Vec<(Id, i64)> = ids
        .iter()
        .map(|&id| (id, rng.random_range(-5..=15)))
        .collect();
    let head_len = rng.random_range(1..=3);
    let head: Vec<Pred> = (0..head_len)
        .map(|_| match rng.random_range(0..4) {
            0 => Pred::Any,
            1 => Pred::Lit(rng.random_range(-5..=15)),
            2 => Pred::Gt(rng.random_range(-5..=15)),
            _ => Pred::Lt(rng.random_range(-5..=15)),
        })
        .collect();
    let guard = match rng.random_range(0..4) {
        0 => TestGuard::True,
        1 => TestGuard::False,
        2 => TestGuard::FirstLeLast,
        _ => TestGuard::SumEven,
    };
    let active = store[rng.random_range(0..store.len())];
    let mut history = BTreeSet::new();
    for _ in 0..rng.random_range(0..4) {
        let ids: Vec<Id> = (0..head_len)
            .map(|_| store[rng.random_range(0..store.len())].0)
            .collect();
        history.insert(HistoryRecord::new("r", ids));
    }
    MatchInstance {
        head,
        guard,
        store,
        active,
        history,
    }
}

/// Exhaustive reference: does any injective assignment of store entries
/// to head slots, using the active entry somewhere, satisfy heads,
/// history and guard? Enumerates every assignment outright.
fn brute_force_applicable(instance: &MatchInstance) -> bool {
    let n = instance.head.len();
    let mut slots: Vec<(Id, i64)> = Vec::with_capacity(n);
    fn assign(instance: &MatchInstance, slots: &mut Vec<(Id, i64)>) -> bool {
        let n = instance.head.len();
        if slots.len() == n {
            if !slots.iter().any(|(id, _)| *id == instance.active.0) {
                return false;
            }
            let ok_heads = instance
                .head
                .iter()
                .zip(slots.iter())
                .all(|(pred, (_, value))| pred.eval(&Value::Int(*value)));
            if !ok_heads {
                return false;
            }
            let ids: Vec<Id> = slots.iter().map(|(id, _)| *id).collect();
            if instance.history.contains(&HistoryRecord::new("r", ids)) {
                return false;
            }
            let values: Vec<Value> = slots.iter().map(|(_, v)| Value::Int(*v)).collect();
            return instance.guard.eval(&values);
        }
        for &(id, value) in &instance.store {
            if slots.iter().any(|(used, _)| *used == id) {
                continue;
            }
            slots.push((id, value));
            if assign(instance, slots) {
                return true;
            }
            slots.pop();
        }
        false
    }
    assign(instance, &mut slots)
}

#[test]
fn criterion_5_matcher_agrees_with_brute_force() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let mut matched = 0;
    for case in 0..500 {
        let instance = random_instance(&mut rng);
        let head: Vec<HeadPredicate> = instance
            .head
            .iter()
            .map(|p| p.as_head_predicate())
            .collect();
        let guard = instance.guard.as_guard();
        let store: chr::state::Store = instance
            .store
            .iter()
            .map(|&(id, v)| (id, Value::Int(v)))
            .collect();
        let found = find_match(
            "r",
            &head,
            &guard,
            instance.active.0,
            &Value::Int(instance.active.1),
            &store,
            &instance.history,
        )
        .unwrap();
        let applicable = brute_force_applicable(&instance);
        assert_eq!(
            found.is_some(),
            applicable,
            "case {case}: matcher and brute force disagree on {instance:?}"
        );
        if let Some(matching) = found {
            matched += 1;
            let ids = matching.ids();
            let values = matching.values();
            assert!(ids.contains(&instance.active.0));
            let mut distinct = ids.clone();
            distinct.sort_unstable();
            distinct.dedup();
            assert_eq!(distinct.len(), ids.len(), "identifiers must be distinct");
            for (id, value) in matching.pairs() {
                assert_eq!(store.get(id), Some(value), "pairs must come from the store");
            }
            for (pred, value) in instance.head.iter().zip(&values) {
                assert!(pred.eval(value), "head predicate fails on the result");
            }
            assert!(!instance.history.contains(&HistoryRecord::new("r", ids)));
            assert!(instance.guard.eval(&values), "guard fails on the result");
        }
    }
    eprintln!("[criterion 5] PASS: 500 random instances agree with exhaustive enumeration ({matched} applicable)");
}

#[test]
fn criterion_6_root_steps_make_progress() {
    let gcd = builtins::gcd();
    let trans = builtins::trans();
    let mut inputs: Vec<(Program, Vec<Value>)> = vec![
        (gcd.clone(), ints(&[6, 9])),
        (trans.clone(), parse_values("(a,b), (b,c)").unwrap()),
        (gcd.clone(), ints(&[0])),
    ];
    for query in &random_gcd_queries() {
        inputs.push((gcd.clone(), ints(query)));
    }
    let mut steps = 0u64;
    for (program, query) in &inputs {
        let mut execution = Execution::new(program, query, &quiet());
        while !execution.finished() {
            let query_before = execution.state().query().len();
            let index_before = execution.state().index();
            let history_before = execution.state().history().len();
            execution.root_step().unwrap();
            let progressed = execution.state().query().len() < query_before
                || execution.state().index() > index_before
                || execution.state().history().len() > history_before;
            assert!(progressed, "a root step made no progress");
            steps += 1;
        }
    }
    eprintln!("[criterion 6] PASS: all {steps} root steps shrank the query, advanced the index or grew the history");
}

fn trace_text(trace: &[TraceEvent]) -> String {
    trace
        .iter()
        .map(|event| event.to_json().to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Queries for the transitive-closure program: forward edges over an
/// ordered endpoint alphabet (so the closure terminates; a cyclic edge
/// set diverges, since the history is identifier-keyed) plus non-pair
/// values that no head admits.
fn random_trans_query(rng: &mut StdRng) -> Vec<Value> {
    let endpoints = ["a", "b", "c", "d"];
    let len = rng.random_range(0..=4);
    (0..len)
        .map(|_| match rng.random_range(0..5) {
            0 => Value::Int(rng.random_range(-3..=9)),
            1 => Value::sym(endpoints[rng.random_range(0..endpoints.len())]).unwrap(),
            _ => {
                let from = rng.random_range(0..endpoints.len() - 1);
                let to = rng.random_range(from + 1..endpoints.len());
                Value::pair(
                    Value::sym(endpoints[from]).unwrap(),
                    Value::sym(endpoints[to]).unwrap(),
                )
            }
        })
        .collect()
}

#[test]
fn criterion_7_dsl_twins_replay_the_closure_programs() {
    let handwritten_gcd = builtins::gcd();
    let compiled_gcd = compile_source(builtins::GCD_SOURCE).unwrap();
    let handwritten_trans = builtins::trans();
    let compiled_trans = compile_source(builtins::TRANS_SOURCE).unwrap();

    let mut rng = StdRng::seed_from_u64(0xd51_0007);
    for case in 0..100 {
        let query: Vec<Value> = {
            let len = rng.random_range(0..=5);
            (0..len)
                .map(|_| Value::Int(rng.random_range(-3..=60)))
                .collect()
        };
        let a = run(&handwritten_gcd, &query, &RunOptions::default()).unwrap();
        let b = run(&compiled_gcd, &query, &RunOptions::default()).unwrap();
        assert_eq!(a.state, b.state, "gcd case {case} diverged on {query:?}");
        assert_eq!(
            trace_text(&a.trace),
            trace_text(&b.trace),
            "gcd case {case} traces diverged on {query:?}"
        );

        let query = random_trans_query(&mut rng);
        let a = run(&handwritten_trans, &query, &RunOptions::default()).unwrap();
        let b = run(&compiled_trans, &query, &RunOptions::default()).unwrap();
        assert_eq!(a.state, b.state, "trans case {case} diverged on {query:?}");
        assert_eq!(
            trace_text(&a.trace),
            trace_text(&b.trace),
            "trans case {case} traces diverged on {query:?}"
        );
    }
    eprintln!("[criterion 7] PASS: dialect gcd and trans replay the closure programs byte-for-byte on 100 random queries each");
}

/// Golden check for a body of length two, where queueing order is
/// observable in identifiers and history. The zero-length and
/// one-length bodies of gcd and trans cannot see a reversed body push,
/// so the mutation criterion adds this instance.
fn split_golden_check(executor: Executor) -> Result<(), String> {
    let query = parse_values("(a, b)").expect("query parses");
    let mut execution = Execution::with_executor(executor, &query, &RunOptions::default());
    while !execution.finished() {
        execution.root_step().map_err(|e| e.to_string())?;
    }
    let state = execution.state();
    let store: Vec<(Id, String)> = state
        .store()
        .iter()
        .map(|(id, value)| (*id, value.render()))
        .collect();
    let expected = vec![(2, "a".to_string()), (3, "b".to_string())];
    if store != expected {
        return Err(format!("store is {store:?}, expected {expected:?}"));
    }
    if state.history() != &history_of(&[("split", &[1])]) {
        return Err(format!("history is {:?}", state.history()));
    }
    if state.index() != 4 {
        return Err(format!("index is {}, expected 4", state.index()));
    }
    Ok(())
}

fn split_program() -> Program {
    compile_source("split @ (X, Y) <=> X, Y .").expect("split compiles")
}

#[test]
fn criterion_8_mutants_are_caught() {
    let gcd = builtins::gcd();
    let trans = builtins::trans();
    let split = split_program();

    // a small budget: a mutant stuck in a loop is a deviation in itself,
    // and the skip-history mutant grows its state without bound
    let cap = 2_000;

    // the real engine passes every check the mutants are run against
    gcd_golden_check(compile(&gcd)).unwrap();
    trans_golden_check(compile(&trans)).unwrap();
    split_golden_check(compile(&split)).unwrap();
    sound_run(&gcd, compile(&gcd), &ints(&[6, 9]), cap).unwrap();
    sound_run(
        &trans,
        compile(&trans),
        &parse_values("(a,b), (b,c)").unwrap(),
        cap,
    )
    .unwrap();
    sound_run(
        &split,
        compile(&split),
        &parse_values("(a, b)").unwrap(),
        cap,
    )
    .unwrap();

    for mutant in [
        Mutant::SkipHistory,
        Mutant::RemoveKept,
        Mutant::ReverseBodyPush,
    ] {
        let mut caught_by = Vec::new();
        if gcd_golden_check(compile_with_mutant(&gcd, mutant)).is_err() {
            caught_by.push("gcd golden run");
        }
        if trans_golden_check(compile_with_mutant(&trans, mutant)).is_err() {
            caught_by.push("trans golden run");
        }
        if split_golden_check(compile_with_mutant(&split, mutant)).is_err() {
            caught_by.push("split golden run");
        }
        if sound_run(&gcd, compile_with_mutant(&gcd, mutant), &ints(&[6, 9]), cap).is_err()
            || sound_run(
                &trans,
                compile_with_mutant(&trans, mutant),
                &parse_values("(a,b), (b,c)").unwrap(),
                cap,
            )
            .is_err()
            || sound_run(
                &split,
                compile_with_mutant(&split, mutant),
                &parse_values("(a, b)").unwrap(),
                cap,
            )
            .is_err()
        {
            caught_by.push("per-step soundness");
        }
        assert!(
            !caught_by.is_empty(),
            "{mutant:?} slipped through every check"
        );
        eprintln!(
            "[criterion 8] {mutant:?} caught by: {}",
            caught_by.join(", ")
        );
    }
    eprintln!("[criterion 8] PASS: all three engine mutants fail at least one check");
}

#[test]
fn final_stores_format_canonically() {
    // sanity link between the engine and the CLI's printed form
    let outcome = run(&builtins::gcd(), &ints(&[6, 9]), &quiet()).unwrap();
    assert_eq!(format_store(&outcome.state), "{3}");
    let outcome = run(&builtins::gcd(), &[], &quiet()).unwrap();
    assert_eq!(format_store(&outcome.state), "{}");
    assert_eq!(outcome.state, ExecState::new());
}
