mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::EXIT_USAGE;

fn thread_cap(command: &Command) -> Option<usize> {
    match command {
        Command::BuildQubo(a) => a.threads,
        Command::Solve(a) => a.run.threads,
        Command::Sweep(a) => a.run.threads,
        Command::Baseline(a) => a.threads,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    match thread_cap(&cli.command) {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        Some(n) => pool = pool.num_threads(n),
        None => {}
    }
    let pool = pool.build().expect("thread pool starts");

    let result = pool.install(|| match &cli.command {
        Command::BuildQubo(a) => commands::build_qubo(a),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Baseline(a) => commands::baseline(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
