//! Pins the complete per-rule-call state sequence of the gcd run on
//! [6, 9]: thirteen rule applications in program order, each checked as
//! a canonical snapshot. Golden at the finest granularity the engine
//! has, so any change to activation, cleanup, matching order, firing
//! bookkeeping or the is-last drop shows up here by name.

use chr::builtins;
use chr::engine::{rule_step, TraceConfig, Tracer};
use chr::program::Rule;
use chr::state::ExecState;
use chr::value::Value;

#[test]
fn gcd_rule_call_sequence_is_golden() {
    let gcd = builtins::gcd();
    let rules: Vec<Rule> = gcd.rules().into_iter().cloned().collect();
    assert_eq!(rules.len(), 2);

    let expected = [
        // root pass 1: zero activates 6, subtract finds no partner and drops it
        (
            "zero",
            r#"{"history":[],"index":2,"query":[{"id":1,"value":"6"},{"id":null,"value":"9"}],"store":[[1,"6"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[],"index":2,"query":[{"id":null,"value":"9"}],"store":[[1,"6"]]}"#,
        ),
        // root pass 2: zero activates 9, subtract fires on (1, 2) and queues 3
        (
            "zero",
            r#"{"history":[],"index":3,"query":[{"id":2,"value":"9"}],"store":[[1,"6"],[2,"9"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[["subtract",[1,2]]],"index":3,"query":[{"id":null,"value":"3"},{"id":2,"value":"9"}],"store":[[1,"6"]]}"#,
        ),
        // root pass 3: subtract fires with the active 3 kept and 6 removed
        (
            "zero",
            r#"{"history":[["subtract",[1,2]]],"index":4,"query":[{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[1,"6"],[3,"3"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]]],"index":4,"query":[{"id":null,"value":"3"},{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[3,"3"]]}"#,
        ),
        // root pass 4: the fresh 3 loses against the older 3 and queues 0
        (
            "zero",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]]],"index":5,"query":[{"id":4,"value":"3"},{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[3,"3"],[4,"3"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]]],"index":5,"query":[{"id":null,"value":"0"},{"id":4,"value":"3"},{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[3,"3"]]}"#,
        ),
        // root pass 5: zero activates 0 and fires in the same call
        (
            "zero",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]],["zero",[5]]],"index":6,"query":[{"id":5,"value":"0"},{"id":4,"value":"3"},{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[3,"3"]]}"#,
        ),
        // root pass 6: zero cleans up the dead entries, subtract drops the live 3
        (
            "zero",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]],["zero",[5]]],"index":6,"query":[{"id":3,"value":"3"},{"id":2,"value":"9"}],"store":[[3,"3"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]],["zero",[5]]],"index":6,"query":[{"id":2,"value":"9"}],"store":[[3,"3"]]}"#,
        ),
        // root pass 7: both rules meet an emptied query
        (
            "zero",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]],["zero",[5]]],"index":6,"query":[],"store":[[3,"3"]]}"#,
        ),
        (
            "subtract",
            r#"{"history":[["subtract",[1,2]],["subtract",[3,1]],["subtract",[3,4]],["zero",[5]]],"index":6,"query":[],"store":[[3,"3"]]}"#,
        ),
    ];

    let mut state = ExecState::initial(&[Value::Int(6), Value::Int(9)]);
    let mut tracer = Tracer::new(TraceConfig::default());
    let mut seen: Vec<(String, String)> = Vec::new();
    // the run driver inlined at rule granularity: traverse the rules in
    // order, restart from the top on a firing, stop when the query drains
    while !state.query().is_empty() {
        let last = rules.len() - 1;
        for (i, rule) in rules.iter().enumerate() {
            let result = rule_step(rule, i == last, state, &mut tracer).unwrap();
            state = result.state;
            seen.push((rule.name().to_string(), state.snapshot().to_string()));
            if result.fired {
                break;
            }
        }
    }

    assert_eq!(seen.len(), expected.len(), "rule call count");
    for (call, ((rule, snapshot), (expected_rule, expected_snapshot))) in
        seen.iter().zip(expected.iter()).enumerate()
    {
        assert_eq!(rule, expected_rule, "rule of call {call}");
        assert_eq!(
            snapshot, expected_snapshot,
            "state after call {call} ({rule})"
        );
    }
}
