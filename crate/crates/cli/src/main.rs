use std::process::ExitCode;

use casimir_cli::{configure_threads, run, Cli, RunConfig, THREADS_ENV};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    let result = configure_threads(threads.as_deref())
        .and_then(|_| RunConfig::from_cli(cli))
        .and_then(|cfg| {
            let to_file = cfg.output.path.is_some();
            run(&cfg).map(|summary| (summary, to_file))
        });
    match result {
        Ok((summary, true)) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Ok((summary, false)) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("casimir: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
