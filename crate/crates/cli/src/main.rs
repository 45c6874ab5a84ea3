use std::process::ExitCode;

use clap::Parser;

use frac_pp_cli::{run_mode, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.overrides.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.resolve().and_then(|cfg| run_mode(&cfg)) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
