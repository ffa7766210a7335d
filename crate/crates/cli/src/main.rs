mod commands;
mod config;
mod error;
mod report;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Format, RunConfig};
use error::CliError;

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(&cli.command, &cli.flags)?;
    let out = commands::run(&cli.command, &cfg)?;
    let text = match (cfg.format, &out.table) {
        (Format::Csv, Some(t)) => t.to_csv()?,
        (Format::Csv, None) => return Err(CliError::Usage(format!("{} has no CSV form", cfg.command))),
        (Format::Json, _) => out.doc.to_json(),
    };
    match &cfg.out {
        Some(path) => report::write_atomic(path, &text)?,
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            // a closed pipe (e.g. `| head`) is not an error
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            other => other?,
        },
    }
    let pass = out.doc.status == "pass";
    if !pass {
        if let Some(name) = out.doc.result.get("first_failure").and_then(|v| v.as_str()) {
            eprintln!("invariant failed: {name}");
        }
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("renorm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
