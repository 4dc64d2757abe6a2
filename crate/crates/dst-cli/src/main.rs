mod args;
mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Format};
use commands::{Ctx, Outcome};
use config::RunConfig;
use error::CliError;
use report::{render_text, Report, Status};

fn emit(ctx: &Ctx, command: &str, outcome: Outcome) {
    let report = Report {
        command,
        config: &ctx.config,
        inputs: &ctx.inputs,
        warnings: &ctx.warnings,
        status: outcome.status,
        result: outcome.result,
    };
    let doc = report.to_json();
    let text = match ctx.config.format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("json") + "\n",
        Format::Text => render_text(&doc),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::resolve(cli.config.as_deref(), cli.exact, cli.format, cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut ctx = Ctx::new(config);
    let name = commands::name(&cli.command);
    match commands::run(&mut ctx, &cli.command) {
        Ok(outcome) => {
            let code = if outcome.status == Status::Rejected { 2 } else { 0 };
            emit(&ctx, name, outcome);
            ExitCode::from(code)
        }
        Err(CliError::Rejected(msg)) => {
            eprintln!("rejected: {msg}");
            emit(&ctx, name, Outcome { status: Status::Rejected, result: serde_json::json!({ "error": msg }) });
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
