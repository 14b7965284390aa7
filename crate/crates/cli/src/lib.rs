//! Config-driven experiment harness around the `freqdyn` library.

pub mod commands;
pub mod config;
pub mod report;
pub mod setup;
pub mod sigma;

use std::path::PathBuf;

use commands::Command;
use config::Config;
use report::Report;

/// Environment variable overriding the output root (default `out`).
pub const OUTPUT_ROOT_VAR: &str = "FREQDYN_OUT";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"))
}

/// `<root>/<output.dir>/<subcommand>`; `output.dir` is optional.
pub fn output_dir(cfg: &Config, command: Command) -> PathBuf {
    let mut dir = output_root();
    if let Some(sub) = cfg.table.get("output").and_then(|o| o.get("dir")).and_then(|d| d.as_str()) {
        dir.push(sub);
    }
    dir.join(command.name())
}

/// Runs a subcommand, writes its files and summary, and returns the report
/// verdicts with the overall result.
pub fn run(command: Command, cfg: &Config) -> anyhow::Result<(bool, Vec<report::Verdict>, PathBuf)> {
    let dir = output_dir(cfg, command);
    let mut r = Report::new(&command.name(), cfg, dir.clone())?;
    command.run(cfg, &mut r)?;
    let verdicts = r.verdicts.clone();
    let pass = r.finish()?;
    Ok((pass, verdicts, dir))
}
