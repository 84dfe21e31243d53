use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use yamabe_cli::{dispatch, Command, RunConfig};

/// Bifurcation branches and degenerate solutions of the Yamabe-type
/// equation on S^n x S^n.
#[derive(Debug, Parser)]
#[command(name = "yamabe", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// TOML file of run parameters
    #[arg(long)]
    config: Option<PathBuf>,

    /// Overrides of the form key=value
    overrides: Vec<String>,
}

fn init_logging() {
    let style = if std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) {
        env_logger::WriteStyle::Never
    } else {
        env_logger::WriteStyle::Auto
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .write_style(style)
        .init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    init_logging();
    let result = RunConfig::load(cli.config.as_deref(), &cli.overrides).and_then(|cfg| dispatch(cli.command, &cfg));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
