mod args;
mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use coarsekit::json::{self, NumberKind};
use coarsekit::Exact;
use serde_json::json;

use args::{Cli, Global};
use commands::{Body, Output};
use input::{CliError, Docs};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            diagnose(&CliError::Usage(e.render().to_string().trim_end().to_string()));
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            diagnose(&e);
            ExitCode::from(e.exit_code())
        }
    }
}

fn diagnose(e: &CliError) {
    let line = json!({"error": e.kind(), "message": e.message()});
    eprintln!("{line}");
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    if let Some(out) = &cli.global.out {
        if out.exists() && !cli.global.force {
            return Err(CliError::Usage(format!(
                "{} exists; pass --force to overwrite",
                out.display()
            )));
        }
    }
    let docs = Docs::load(commands::file_args(&cli.command))?;
    let output = if cli.global.float || docs.kind() == NumberKind::Float {
        commands::run::<f64>(cli, &docs)?
    } else {
        commands::run::<Exact>(cli, &docs)?
    };
    emit(&cli.global, &output)?;
    Ok(output.status)
}

fn emit(global: &Global, output: &Output) -> Result<(), CliError> {
    let text = match &output.body {
        Body::Json(v) => json::to_canonical_string(v),
        Body::Text(t) => t.clone(),
    };
    match &global.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
        }
    }
}
