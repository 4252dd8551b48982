//! A runtime for ground Constraint Handling Rules: multisets of values
//! rewritten by guarded multi-headed rules.
//!
//! Programs are built from single rules composed into ordered
//! composites, as plain data with opaque guard/body functions. A
//! structural fold turns a program into its executor ([`engine`]),
//! which runs the deterministic call-stack semantics: activate the top
//! query value, search the program top-to-bottom and each head
//! right-to-left for the first applicable configuration, fire or drop,
//! repeat until the query drains. A firing history keeps any
//! configuration from firing twice.
//!
//! The [`oracle`] module carries an independent brute-force
//! multiset-rewriting semantics and a per-step checker that validates
//! every engine step against it: differential testing for the executor,
//! also available from the CLI as `--check-soundness`.
//!
//! Rules can be written as Rust closures ([`program`], [`builtins`]) or
//! in a small text dialect ([`textlang`]):
//!
//! ```
//! let program = chr::textlang::compile_source(chr::builtins::GCD_SOURCE).unwrap();
//! let query = chr::value::parse_values("6, 9").unwrap();
//! let outcome = chr::engine::run(&program, &query, &Default::default()).unwrap();
//! assert_eq!(chr::state::format_store(&outcome.state), "{3}");
//! ```

pub mod builtins;
pub mod engine;
pub mod matcher;
pub mod oracle;
pub mod program;
pub mod state;
pub mod textlang;
pub mod value;

pub use engine::{compile, run, Execution, RunOptions};
pub use oracle::check_soundness;
pub use program::{compose_programs, fold, make_rule, Program, Rule};
pub use state::ExecState;
pub use value::Value;
