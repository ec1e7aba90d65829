//! `hsl`: scenario runner for the radial solvers in `hsl-core`.
//!
//! Every run prints a JSON report on stdout. With `--out DIR` the report, the
//! CSV tables and a manifest are also written to `DIR`. Exit status is 0 on
//! success, 1 on invalid input, 2 when a solver fails.

mod commands;
mod knobs;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{json, Value};

use commands::COMMANDS;
use knobs::{Knobs, KEYS};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(hsl_core::Error),
}

impl From<hsl_core::Error> for CliError {
    fn from(e: hsl_core::Error) -> Self {
        match e {
            hsl_core::Error::Domain(msg) => CliError::Validation(msg),
            other => CliError::Numeric(other),
        }
    }
}

fn cli() -> Command {
    let mut root = Command::new("hsl")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Radial solvers for elliptic equations with an inverse-square potential")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value settings; flags override them"),
        )
        .arg(Arg::new("out").long("out").global(true).value_name("DIR").help("write JSON, CSV and manifest here"))
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .global(true)
                .env("HSL_JOBS")
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads for sweeps (0 = one per core)"),
        );
    for c in COMMANDS {
        let mut sub = Command::new(c.name).about(c.about).after_help(format!("CSV output:\n{}", c.tables));
        for key in c.keys {
            let help = KEYS.iter().find(|(k, _)| k == key).map(|(_, h)| *h).unwrap_or("");
            sub = sub.arg(Arg::new(*key).long(key.replace('_', "-")).value_name("X").help(help).action(ArgAction::Set));
        }
        root = root.subcommand(sub);
    }
    root
}

fn knobs_for(cmd: &commands::Command, m: &ArgMatches) -> Result<Knobs, CliError> {
    let mut k = match m.get_one::<String>("config") {
        Some(path) => Knobs::from_file(&PathBuf::from(path))?,
        None => Knobs::default(),
    };
    if let Some(extra) = k.as_map().keys().find(|key| !cmd.keys.contains(&key.as_str())) {
        return Err(CliError::Validation(format!("{} does not use {extra}", cmd.name)));
    }
    for key in cmd.keys {
        if let Some(v) = m.get_one::<String>(key) {
            k.set(key, v.clone());
        }
    }
    Ok(k)
}

/// A failed run, with what is needed to still emit a report.
struct Failure {
    err: CliError,
    ctx: Option<(&'static commands::Command, Value, Option<PathBuf>)>,
}

impl From<CliError> for Failure {
    fn from(err: CliError) -> Self {
        Self { err, ctx: None }
    }
}

fn run() -> Result<(), Failure> {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = COMMANDS.iter().find(|c| c.name == name).expect("registered command");
    let knobs = knobs_for(cmd, sub)?;
    let out = sub.get_one::<String>("out").map(PathBuf::from);
    let jobs = sub.get_one::<usize>("jobs").copied().unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {jobs} workers: {e}")))?;
    let outcome = pool.install(|| (cmd.run)(&knobs));
    let params = knobs.resolved();
    match outcome {
        Ok(outcome) => {
            let doc = output::report(cmd.name, cmd.anchor, &params, "ok", ("result", outcome.result));
            emit(&doc);
            if let Some(dir) = out {
                output::write_all(&dir, cmd.name, &doc, &outcome.tables, &params)?;
            }
            Ok(())
        }
        Err(err) => Err(Failure { err, ctx: Some((cmd, params, out)) }),
    }
}

// a closed pipe (`hsl ... | head`) is not an error worth a panic
fn emit(doc: &Value) {
    let text = serde_json::to_string_pretty(doc).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let Err(Failure { err, ctx }) = run() else {
        return ExitCode::SUCCESS;
    };
    match err {
        CliError::Validation(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        CliError::Numeric(err) => {
            eprintln!("numeric failure: {err}");
            if let Some((cmd, params, out)) = ctx {
                let error = json!({ "kind": format!("{err:?}"), "message": err.to_string() });
                let doc = output::report(cmd.name, cmd.anchor, &params, "numeric_failure", ("error", error));
                emit(&doc);
                if let Some(dir) = out {
                    if let Err(CliError::Validation(msg)) = output::write_all(&dir, cmd.name, &doc, &[], &params) {
                        eprintln!("error: {msg}");
                    }
                }
            }
            ExitCode::from(2)
        }
    }
}
