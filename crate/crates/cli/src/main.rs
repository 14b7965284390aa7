use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use freqdyn_cli::commands::Command;
use freqdyn_cli::config::Config;
use freqdyn_cli::report::verdict_line;

/// Frequent-hypercyclicity experiments for composition-operator sequences.
///
/// Exit status: 0 when every verdict passes, 1 when any verdict fails,
/// 2 on a configuration or runtime error.
#[derive(Parser)]
#[command(name = "freqdyn", version)]
struct Cli {
    subcommand: Command,
    /// TOML experiment config.
    config: PathBuf,
    /// Replace a config value, e.g. `--override horizons.n_max=5000`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Config::load(&cli.config, &cli.overrides).and_then(|cfg| freqdyn_cli::run(cli.subcommand, &cfg));
    match result {
        Ok((pass, verdicts, dir)) => {
            for v in &verdicts {
                println!("{}", verdict_line(v));
            }
            println!("output: {}", dir.display());
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
