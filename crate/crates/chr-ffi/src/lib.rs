//! C ABI for the rule runtime, so other languages can embed it.
//!
//! Programs and finished runs are opaque handles; every fallible call
//! returns a [`ChrStatus`] and stores a message retrievable with
//! [`chr_last_error_message`]. Strings returned by the library are
//! NUL-terminated, UTF-8, owned by the caller and released with
//! [`chr_string_free`].
//!
//! The generated header lands in `include/chr.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use chr::engine::{self, Execution, RunOptions, TraceConfig};
use chr::oracle::{self, OracleConfig, Verdict};
use chr::state::format_store;
use chr::value::parse_values;
use chr::{builtins, textlang, Program};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChrStatus {
    /// Success.
    ChrOk = 0,
    /// A required pointer was null or otherwise unusable.
    ChrInvalidArgument = 1,
    /// Program or query text did not parse or compile.
    ChrParseError = 2,
    /// The run exhausted its step budget.
    ChrStepBudget = 3,
    /// A soundness check failed.
    ChrUnsound = 4,
    /// A guard or body evaluation failed at runtime.
    ChrEvalError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(message).expect("NULs stripped"));
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

/// Message for the most recent error on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn chr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|message| message.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// An opaque, immutable rule program.
pub struct ChrProgram {
    inner: Program,
}

/// An opaque finished run: final state plus trace.
pub struct ChrRun {
    store_text: String,
    trace_jsonl: String,
    query_len: u64,
    store_len: u64,
    steps: u64,
}

unsafe fn read_utf8<'a>(text: *const c_char, what: &str) -> Result<&'a str, ChrStatus> {
    if text.is_null() {
        set_error(format!("{what} must not be null"));
        return Err(ChrStatus::ChrInvalidArgument);
    }
    match unsafe { CStr::from_ptr(text) }.to_str() {
        Ok(text) => Ok(text),
        Err(_) => {
            set_error(format!("{what} must be valid UTF-8"));
            Err(ChrStatus::ChrInvalidArgument)
        }
    }
}

fn deliver<T>(out: *mut *mut T, value: T, what: &str) -> ChrStatus {
    if out.is_null() {
        set_error(format!("{what} must not be null"));
        return ChrStatus::ChrInvalidArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    clear_error();
    ChrStatus::ChrOk
}

/// Compiles a program from source text in the rule dialect.
///
/// # Safety
/// `source` must point to a NUL-terminated string and `out_program`
/// to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn chr_program_from_source(
    source: *const c_char,
    out_program: *mut *mut ChrProgram,
) -> ChrStatus {
    let source = match unsafe { read_utf8(source, "source") } {
        Ok(source) => source,
        Err(status) => return status,
    };
    match textlang::compile_source(source) {
        Ok(inner) => deliver(out_program, ChrProgram { inner }, "out_program"),
        Err(error) => {
            set_error(error.to_string());
            ChrStatus::ChrParseError
        }
    }
}

/// Looks up a built-in example program ("gcd" or "trans").
///
/// # Safety
/// `name` must point to a NUL-terminated string and `out_program` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn chr_program_builtin(
    name: *const c_char,
    out_program: *mut *mut ChrProgram,
) -> ChrStatus {
    let name = match unsafe { read_utf8(name, "name") } {
        Ok(name) => name,
        Err(status) => return status,
    };
    match builtins::by_name(name) {
        Some(inner) => deliver(out_program, ChrProgram { inner }, "out_program"),
        None => {
            set_error(format!(
                "unknown example {name:?}; available: {}",
                builtins::NAMES.join(", ")
            ));
            ChrStatus::ChrParseError
        }
    }
}

/// Releases a program handle; null is tolerated.
///
/// # Safety
/// `program` must be null or a pointer from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chr_program_free(program: *mut ChrProgram) {
    if !program.is_null() {
        drop(unsafe { Box::from_raw(program) });
    }
}

unsafe fn run_impl(
    program: *const ChrProgram,
    query: *const c_char,
    max_steps: u64,
    check_soundness: bool,
    out_run: *mut *mut ChrRun,
) -> ChrStatus {
    if program.is_null() {
        set_error("program must not be null");
        return ChrStatus::ChrInvalidArgument;
    }
    let program = unsafe { &(*program).inner };
    let query = match unsafe { read_utf8(query, "query") } {
        Ok(query) => query,
        Err(status) => return status,
    };
    let values = match parse_values(query) {
        Ok(values) => values,
        Err(error) => {
            set_error(error.to_string());
            return ChrStatus::ChrParseError;
        }
    };
    let options = RunOptions {
        max_steps: if max_steps == 0 {
            engine::DEFAULT_MAX_STEPS
        } else {
            max_steps
        },
        trace: TraceConfig::default(),
    };
    let mut execution = Execution::new(program, &values, &options);
    let oracle_config = OracleConfig::default();
    while !execution.finished() {
        let before = check_soundness.then(|| execution.state().clone());
        if let Err(error) = execution.root_step() {
            let status = match &error {
                engine::EngineError::StepBudget(_) => ChrStatus::ChrStepBudget,
                _ => ChrStatus::ChrEvalError,
            };
            set_error(error.to_string());
            return status;
        }
        if let Some(before) = before {
            match oracle::check_soundness(program, &before, execution.state(), &oracle_config) {
                Ok(Verdict::Pass(_)) => {}
                Ok(Verdict::Fail(failure)) => {
                    set_error(failure.to_string());
                    return ChrStatus::ChrUnsound;
                }
                Err(error) => {
                    set_error(format!("soundness check unverified: {error}"));
                    return ChrStatus::ChrUnsound;
                }
            }
        }
    }
    let steps = execution.steps_taken();
    let state = execution.state().clone();
    let trace_jsonl = execution
        .events()
        .iter()
        .map(|event| event.to_json().to_string())
        .collect::<Vec<_>>()
        .join("\n");
    let run = ChrRun {
        store_text: format_store(&state),
        trace_jsonl,
        query_len: state.query().len() as u64,
        store_len: state.store().len() as u64,
        steps,
    };
    deliver(out_run, run, "out_run")
}

/// Runs a program on a comma-separated query. `max_steps` of 0 selects
/// the default budget.
///
/// # Safety
/// `program` must be a live program handle, `query` a NUL-terminated
/// string and `out_run` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn chr_run(
    program: *const ChrProgram,
    query: *const c_char,
    max_steps: u64,
    out_run: *mut *mut ChrRun,
) -> ChrStatus {
    unsafe { run_impl(program, query, max_steps, false, out_run) }
}

/// Like [`chr_run`] but validates every root-level step against the
/// multiset-rewriting oracle; an unsound step aborts the run.
///
/// # Safety
/// Same contract as [`chr_run`].
#[no_mangle]
pub unsafe extern "C" fn chr_run_checked(
    program: *const ChrProgram,
    query: *const c_char,
    max_steps: u64,
    out_run: *mut *mut ChrRun,
) -> ChrStatus {
    unsafe { run_impl(program, query, max_steps, true, out_run) }
}

unsafe fn run_ref<'a>(run: *const ChrRun) -> Option<&'a ChrRun> {
    unsafe { run.as_ref() }
}

/// Final store as a sorted multiset, e.g. `{3}`; caller frees.
///
/// # Safety
/// `run` must be a live run handle.
#[no_mangle]
pub unsafe extern "C" fn chr_run_store_text(run: *const ChrRun) -> *mut c_char {
    match unsafe { run_ref(run) } {
        Some(run) => CString::new(run.store_text.clone())
            .expect("store text has no NULs")
            .into_raw(),
        None => ptr::null_mut(),
    }
}

/// Trace as newline-separated JSON events; caller frees.
///
/// # Safety
/// `run` must be a live run handle.
#[no_mangle]
pub unsafe extern "C" fn chr_run_trace_jsonl(run: *const ChrRun) -> *mut c_char {
    match unsafe { run_ref(run) } {
        Some(run) => CString::new(run.trace_jsonl.clone())
            .expect("trace has no NULs")
            .into_raw(),
        None => ptr::null_mut(),
    }
}

/// Number of values left on the query (0 after a completed run).
///
/// # Safety
/// `run` must be a live run handle.
#[no_mangle]
pub unsafe extern "C" fn chr_run_query_len(run: *const ChrRun) -> u64 {
    unsafe { run_ref(run) }.map_or(0, |run| run.query_len)
}

/// Number of values in the final store.
///
/// # Safety
/// `run` must be a live run handle.
#[no_mangle]
pub unsafe extern "C" fn chr_run_store_len(run: *const ChrRun) -> u64 {
    unsafe { run_ref(run) }.map_or(0, |run| run.store_len)
}

/// Root-level steps the run took.
///
/// # Safety
/// `run` must be a live run handle.
#[no_mangle]
pub unsafe extern "C" fn chr_run_steps(run: *const ChrRun) -> u64 {
    unsafe { run_ref(run) }.map_or(0, |run| run.steps)
}

/// Releases a run handle; null is tolerated.
///
/// # Safety
/// `run` must be null or a pointer from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chr_run_free(run: *mut ChrRun) {
    if !run.is_null() {
        drop(unsafe { Box::from_raw(run) });
    }
}

/// Releases a string returned by this library; null is tolerated.
///
/// # Safety
/// `text` must be null or a string pointer from this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn chr_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
