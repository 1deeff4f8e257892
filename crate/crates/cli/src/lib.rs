//! Command-line front end for the runup solvers.
//!
//! Each subcommand writes its outputs and a `summary.json` into `--outdir`.
//! The summary carries the parsed arguments, the resolved solver settings
//! and the sha256 of the input, so a run can be repeated from it alone.

pub mod args;
pub mod commands;
pub mod error;
pub mod selftest;
pub mod table;

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::commands::{prepare_outdir, write_summary, Summary};
use crate::error::{exit, CliError};

pub const SUMMARY_SCHEMA: &str = "runup-summary/1";

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Direct(_) => "direct",
        Command::Inverse(_) => "inverse",
        Command::Roundtrip(_) => "roundtrip",
        Command::Selftest(_) => "selftest",
        Command::WaveeqCheck(_) => "waveeq-check",
    }
}

fn outdir(c: &Command) -> Option<&Path> {
    match c {
        Command::Direct(a) => Some(&a.io.outdir),
        Command::Inverse(a) => Some(&a.io.outdir),
        Command::Roundtrip(a) => Some(&a.io.outdir),
        Command::WaveeqCheck(a) => Some(&a.io.outdir),
        Command::Selftest(a) => a.outdir.as_deref(),
    }
}

fn error_json(e: &CliError) -> Value {
    let mut v = json!({ "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    if let CliError::Core(runup_core::RunupError::Breaking { margin, .. }) = e {
        v["margin"] = json!(margin);
    }
    v
}

fn selftest(a: &args::SelftestArgs, summary: &mut Summary) -> i32 {
    let report = selftest::run_selftest(a.perturb_abel_weights);
    for c in &report.checks {
        let measured = c.measured.map_or_else(
            || c.error.clone().unwrap_or_default(),
            |m| format!("{m:.3e}"),
        );
        println!(
            "{} {:<30} {measured} (tolerance {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.tolerance
        );
    }
    println!(
        "selftest: {} passed, {} failed",
        report.passed, report.failed
    );
    let pass = report.pass;
    summary.insert("report".into(), json!(report));
    if pass {
        exit::OK
    } else {
        exit::CHECK_FAILED
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let name = command_name(&cli.command);
    let mut summary = Summary::new();
    summary.insert("schema".into(), json!(SUMMARY_SCHEMA));
    summary.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    summary.insert("command".into(), json!(name));
    summary.insert("arguments".into(), json!(cli.command));

    let dir = outdir(&cli.command);
    if let Some(d) = dir {
        if let Err(e) = prepare_outdir(d) {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    }
    let result = match &cli.command {
        Command::Direct(a) => commands::run_direct(a, &mut summary),
        Command::Inverse(a) => commands::run_inverse(a, &mut summary),
        Command::Roundtrip(a) => commands::run_roundtrip(a, &mut summary),
        Command::WaveeqCheck(a) => commands::run_waveeq_check(a, &mut summary),
        Command::Selftest(a) => Ok(selftest(a, &mut summary)),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            summary.insert("error".into(), error_json(&e));
            e.exit_code()
        }
    };
    let status = match code {
        exit::OK => "ok",
        exit::CHECK_FAILED => "failed",
        _ => "error",
    };
    summary.insert("status".into(), json!(status));
    summary.insert("exit_code".into(), json!(code));
    if let Some(d) = dir {
        let file = if name == "selftest" {
            "selftest.json"
        } else {
            "summary.json"
        };
        if let Err(e) = write_summary(d, file, &summary) {
            eprintln!("error: {e}");
            return if code == exit::OK {
                e.exit_code()
            } else {
                code
            };
        }
    }
    code
}

/// Parses `args` (program name first) and runs. Usage errors exit with the
/// schema status; `--help` and `--version` exit cleanly.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::IO
            } else {
                exit::OK
            }
        }
    }
}
