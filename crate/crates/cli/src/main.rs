mod args;
mod config;
mod run;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, CommandArgs, FormatArg};
use config::RunConfig;
use schauder_core::{Format, ReportTable};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("run `schauder --help` for usage");
    ExitCode::from(EXIT_USAGE)
}

/// Reads the `config` entry back from a CSV or JSON output file.
fn recorded_config(path: &Path) -> Result<RunConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let meta = if text.starts_with("# ") {
        ReportTable::header_meta(&text).map_err(|e| e.to_string())?
    } else {
        serde_json::from_str::<ReportTable>(&text).map_err(|e| format!("{}: {e}", path.display()))?.meta
    };
    let value = meta.get("config").ok_or_else(|| format!("{} has no recorded config", path.display()))?;
    let cfg: RunConfig =
        serde_json::from_value(value.clone()).map_err(|e| format!("{}: bad config: {e}", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = match &cli.command {
        CommandArgs::Replay { file } => recorded_config(file),
        _ => RunConfig::from_cli(&cli),
    };
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(msg) => return usage(&msg),
    };
    let table = match run::execute(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let format = match cfg.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let rendered = table.render(format);
    let written = match &cli.global.out {
        Some(path) => fs::write(path, rendered.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(rendered.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_FAIL);
    }
    if !cli.global.quiet {
        for c in &table.checks {
            eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if table.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
