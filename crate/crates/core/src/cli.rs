//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 step limit
//! exceeded, 3 audit failure under `--audit strict`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus;
use crate::engine::audit::AuditReport;
use crate::engine::{compose, ComposeOptions, ComposeResult, Outcome, DEFAULT_STEP_LIMIT};
use crate::syntax::parse_program;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_STEP_LIMIT: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "corotype", version, about = "Compose coroutine types")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compose the coroutines of a program and print the result.
    Compose {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT, value_parser = positive)]
        step_limit: usize,
        /// Print every fired rule.
        #[arg(long, value_enum)]
        trace: Option<TraceMode>,
        /// Report complexity-bound violations; `strict` also fails on them.
        #[arg(long, value_enum, default_value_t = AuditMode::Warn)]
        audit: AuditMode,
    },
    /// Run the bundled examples and compare with their expected results.
    Corpus,
    /// Parse and validate a program without composing it.
    Check { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceMode {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditMode {
    Off,
    Warn,
    Strict,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compose {
            file,
            step_limit,
            trace,
            audit,
        } => run_compose(&file, step_limit, trace, audit, out, err),
        Command::Corpus => run_corpus(out),
        Command::Check { file } => run_check(&file, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INVALID
    })
}

fn read(path: &PathBuf, err: &mut dyn Write) -> std::io::Result<Option<String>> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) => {
            writeln!(err, "error: cannot read {}: {e}", path.display())?;
            Ok(None)
        }
    }
}

fn run_compose(
    path: &PathBuf,
    step_limit: usize,
    trace: Option<TraceMode>,
    audit: AuditMode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    let Some(source) = read(path, err)? else {
        return Ok(EXIT_INVALID);
    };
    let program = match parse_program(&source) {
        Ok(p) => p,
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            return Ok(EXIT_INVALID);
        }
    };
    let result = match compose(&program, &ComposeOptions { step_limit }) {
        Ok(r) => r,
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            return Ok(EXIT_INVALID);
        }
    };
    match trace {
        Some(TraceMode::Text) => out.write_all(result.trace_text().as_bytes())?,
        Some(TraceMode::Json) => out.write_all(result.trace_json().as_bytes())?,
        None => {}
    }
    let code = print_outcome(&result, step_limit, out, err)?;
    if code != EXIT_OK {
        return Ok(code);
    }
    report_audit(&result.audit, audit, err)
}

fn print_outcome(
    result: &ComposeResult,
    step_limit: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<i32> {
    match &result.outcome {
        Outcome::Composed(t) => {
            writeln!(out, "{t}")?;
            Ok(EXIT_OK)
        }
        Outcome::Residual(t) => {
            writeln!(out, "residual: {t}")?;
            Ok(EXIT_OK)
        }
        Outcome::StepLimitExceeded => {
            writeln!(err, "error: step limit of {step_limit} exceeded")?;
            write!(err, "{}", result.state)?;
            Ok(EXIT_STEP_LIMIT)
        }
    }
}

fn report_audit(report: &AuditReport, mode: AuditMode, err: &mut dyn Write) -> std::io::Result<i32> {
    if mode == AuditMode::Off {
        return Ok(EXIT_OK);
    }
    let mut failed = false;
    for entry in report.out_of_bounds() {
        writeln!(err, "audit: {entry}")?;
        failed = true;
    }
    Ok(if failed && mode == AuditMode::Strict {
        EXIT_AUDIT
    } else {
        EXIT_OK
    })
}

fn run_corpus(out: &mut dyn Write) -> std::io::Result<i32> {
    let reports = corpus::run_all();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &reports {
        let mark = if r.passed { "ok  " } else { "FAIL" };
        writeln!(out, "{mark} {:<width$} {:>5} steps  {}", r.name, r.steps, r.actual)?;
        if !r.passed {
            writeln!(out, "     {:<width$} expected     {}", "", r.expected)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} of {} examples as expected", reports.len() - failed, reports.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INVALID })
}

fn run_check(path: &PathBuf, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let Some(source) = read(path, err)? else {
        return Ok(EXIT_INVALID);
    };
    let checked = parse_program(&source).and_then(|p| p.coroutines().map(|c| (p, c)));
    match checked {
        Ok((program, coroutines)) => {
            write!(out, "{program}")?;
            writeln!(out, "ok: {} coroutines", coroutines.len())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(err, "{}: {e}", path.display())?;
            Ok(EXIT_INVALID)
        }
    }
}
