//! `schw`: command-line front end for schwarzkit.
//!
//! Exit status is 0 when every check passes, 1 when a check fails or a
//! numeric routine rejects its input, and 2 on a usage error.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;

const THREADS_VAR: &str = "SCHW_THREADS";

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn execute(cli: Cli) -> Result<bool> {
    let format = cli.global.format;
    let report = commands::run(cli.group, cli.global.seed)?;
    let text = report.render(format);
    match &cli.global.output {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
