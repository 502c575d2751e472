//! Command-line front end for the `pullin_dyn` library.
//!
//! [`run`] is the whole program minus process setup, so tests can drive it
//! in-process with captured output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod record;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches};
use serde_json::Value;

use crate::args::{Cli, Command};
use crate::commands::Context;
use crate::error::{exit, CliError};
use crate::record::RunRecord;

/// The clap command with `args_override_self` applied to every subcommand,
/// so a repeated flag (for instance one injected from `--config` and one
/// typed on the command line) resolves to the last occurrence.
pub fn command() -> clap::Command {
    Cli::command().args_override_self(true).mut_subcommands(|s| s.args_override_self(true))
}

/// Runs the program with the precision override read from the environment.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let env = std::env::var(format::PRECISION_ENV).ok();
    run_with_env(args, env.as_deref(), out, err)
}

/// Runs the program with an explicit value for the precision variable.
/// Returns the process exit code.
pub fn run_with_env<I, S>(args: I, env_precision: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let started = Instant::now();
    let args: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cmd = command();
    let args = match config::expand(args, &cmd) {
        Ok(a) => a,
        Err(e) => return fail(err, &e),
    };
    let matches = match cmd.try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { exit::INVALID_INPUT } else { exit::SUCCESS };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = err.write_all(e.render().to_string().as_bytes());
            return exit::INVALID_INPUT;
        }
    };

    let ctx = Context { precision_flag: cli.precision, env_precision };
    let mut buffer = Vec::new();
    let result = commands::execute(&cli.command, &ctx, &mut buffer);
    let code = match &result {
        Ok(_) => {
            if let Err(e) = out.write_all(&buffer) {
                return fail(err, &CliError::io("cannot write output", e));
            }
            exit::SUCCESS
        }
        Err(e) => fail(err, e),
    };

    if let Some(path) = &cli.record {
        let output = match &result {
            Ok(Some(file)) => Value::String(file.clone()),
            _ => Value::String(String::from_utf8_lossy(&buffer).into_owned()),
        };
        let inputs = inputs_of(&cli.command);
        let rec = RunRecord {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: cli.command.name().to_string(),
            args: args.clone(),
            config_hash: record::config_hash(cli.command.name(), &inputs),
            inputs,
            wall_time_s: started.elapsed().as_secs_f64(),
            exit_code: code,
            output,
        };
        let text = serde_json::to_string_pretty(&rec).expect("run record serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            let e = CliError::io(format!("cannot write run record {}", path.display()), e);
            let record_code = fail(err, &e);
            return if code == exit::SUCCESS { record_code } else { code };
        }
    }
    code
}

fn inputs_of(command: &Command) -> Value {
    let v = match command {
        Command::Pullin(a) => serde_json::to_value(a),
        Command::Classify(a) => serde_json::to_value(a),
        Command::Simulate(a) => serde_json::to_value(a),
        Command::Period(a) => serde_json::to_value(a),
        Command::Sweep(a) => serde_json::to_value(a),
        Command::Generic(a) => serde_json::to_value(a),
    };
    v.unwrap_or(Value::Null)
}

fn fail(err: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}
