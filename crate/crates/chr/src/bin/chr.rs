//! Command-line front end: load a program, run a query, print the final
//! store, optionally write a trace file and check every step against
//! the multiset-rewriting oracle.
//!
//! Exit codes: 0 on success, 2 on parse or configuration errors, 3 when
//! the step budget runs out, 4 when a soundness check fails, 1 on other
//! runtime failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chr::engine::{self, Execution, RunOptions, TraceConfig, TraceEvent};
use chr::oracle::{self, OracleConfig, Verdict};
use chr::program::Program;
use chr::state::{format_store, ExecState};
use chr::value::parse_values;
use chr::{builtins, textlang};

#[derive(Parser)]
#[command(
    name = "chr",
    version,
    about = "Run rule programs over multisets of values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program on a query and print the final store.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in example program (gcd, trans).
    #[arg(
        long,
        value_name = "NAME",
        conflicts_with = "program",
        required_unless_present = "program"
    )]
    example: Option<String>,

    /// Path to a program in the text dialect.
    #[arg(long, value_name = "PATH")]
    program: Option<PathBuf>,

    /// Comma-separated query values, e.g. "6, 9" or "(a,b), (b,c)".
    /// Order matters: the first value runs first.
    #[arg(long, value_name = "VALUES", default_value = "")]
    query: String,

    /// Write the trace as one JSON event per line.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,

    /// Embed a state snapshot in every trace event.
    #[arg(long)]
    snapshots: bool,

    /// Maximum number of root-level steps before giving up.
    #[arg(
        long,
        value_name = "N",
        default_value_t = engine::DEFAULT_MAX_STEPS,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    max_steps: u64,

    /// Check every root-level step against the multiset-rewriting
    /// oracle; exit 4 if any step is unsound.
    #[arg(long)]
    check_soundness: bool,

    /// With --check-soundness: how many rule firings one engine step may
    /// span. The default of 1 is the strict single-firing check.
    #[arg(
        long,
        value_name = "N",
        default_value_t = 1,
        value_parser = clap::value_parser!(u32).range(1..)
    )]
    oracle_depth: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run_command(&args) {
            Ok(code) => code,
            Err(error) => {
                eprintln!("error: {error}");
                ExitCode::from(error.exit_code())
            }
        },
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Runtime(String),
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
            CliError::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Runtime(msg) | CliError::Budget(msg) => {
                f.write_str(msg)
            }
        }
    }
}

fn run_command(args: &RunArgs) -> Result<ExitCode, CliError> {
    let program = load_program(args)?;
    let query = parse_values(&args.query)
        .map_err(|e| CliError::Config(format!("bad --query value: {e}")))?;
    let options = RunOptions {
        max_steps: args.max_steps,
        trace: TraceConfig {
            enabled: true,
            snapshots: args.snapshots,
        },
    };

    let mut execution = Execution::new(&program, &query, &options);
    let soundness = drive(&mut execution, &program, args)?;

    let state = execution.state().clone();
    let trace: Vec<TraceEvent> = execution.events().to_vec();
    if let Some(path) = &args.trace {
        write_trace(path, &trace)?;
    }
    println!("{}", format_store(&state));

    if let Some(report) = soundness {
        report.print();
        if report.failures > 0 {
            return Ok(ExitCode::from(4));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_program(args: &RunArgs) -> Result<Program, CliError> {
    if let Some(name) = &args.example {
        return builtins::by_name(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown example {name:?}; available: {}",
                builtins::NAMES.join(", ")
            ))
        });
    }
    let path = args.program.as_ref().expect("clap requires one source");
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    textlang::compile_source(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Runs to completion. With --check-soundness every root step is
/// verified between states; the run itself is not altered.
fn drive(
    execution: &mut Execution,
    program: &Program,
    args: &RunArgs,
) -> Result<Option<SoundnessReport>, CliError> {
    let mut report = args.check_soundness.then(SoundnessReport::default);
    let oracle_config = OracleConfig::default();

    while !execution.finished() {
        let before = report.is_some().then(|| execution.state().clone());
        execution
            .root_step()
            .map_err(|error| to_cli_error(error, args))?;
        if let (Some(report), Some(before)) = (report.as_mut(), before) {
            report.record(check_step(
                program,
                &before,
                execution.state(),
                args.oracle_depth,
                &oracle_config,
            ));
        }
    }
    Ok(report)
}

fn check_step(
    program: &Program,
    before: &ExecState,
    after: &ExecState,
    depth: u32,
    config: &OracleConfig,
) -> StepCheck {
    if depth == 1 {
        match oracle::check_soundness(program, before, after, config) {
            Ok(Verdict::Pass(_)) => StepCheck::Pass,
            Ok(Verdict::Fail(failure)) => StepCheck::Fail(failure.to_string()),
            Err(error) => StepCheck::Unverified(error.to_string()),
        }
    } else {
        let from = oracle::abstract_r(before);
        let to = oracle::abstract_r(after);
        match oracle::reachable(program, &from, &to, depth, config) {
            Ok(true) => StepCheck::Pass,
            Ok(false) => StepCheck::Fail(format!(
                "state {to} not reachable from {from} within {depth} firings"
            )),
            Err(error) => StepCheck::Unverified(error.to_string()),
        }
    }
}

enum StepCheck {
    Pass,
    Fail(String),
    Unverified(String),
}

#[derive(Default)]
struct SoundnessReport {
    checked: u64,
    failures: u64,
    unverified: u64,
    details: Vec<String>,
}

impl SoundnessReport {
    fn record(&mut self, check: StepCheck) {
        let step = self.checked;
        self.checked += 1;
        match check {
            StepCheck::Pass => {}
            StepCheck::Fail(detail) => {
                self.failures += 1;
                self.details.push(format!("step {step}: FAIL: {detail}"));
            }
            StepCheck::Unverified(detail) => {
                self.unverified += 1;
                self.details
                    .push(format!("step {step}: unverified: {detail}"));
            }
        }
    }

    fn print(&self) {
        for line in &self.details {
            eprintln!("soundness: {line}");
        }
        eprintln!(
            "soundness: {} steps checked, {} failed, {} unverified",
            self.checked, self.failures, self.unverified
        );
    }
}

fn to_cli_error(error: engine::EngineError, args: &RunArgs) -> CliError {
    match error {
        engine::EngineError::StepBudget(run) => {
            if let Some(path) = &args.trace {
                // keep the partial trace around for debugging the divergence
                if let Err(io) = write_trace(path, &run.trace) {
                    eprintln!("warning: could not write partial trace: {io}");
                }
            }
            CliError::Budget(format!(
                "stopped after {} root steps with {} values still queued (partial store {})",
                run.max_steps,
                run.state.query().len(),
                format_store(&run.state),
            ))
        }
        other => CliError::Runtime(other.to_string()),
    }
}

fn write_trace(path: &Path, events: &[TraceEvent]) -> Result<(), CliError> {
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    for event in events {
        writeln!(file, "{}", event.to_json())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
