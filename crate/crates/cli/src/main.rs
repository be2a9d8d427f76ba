//! `sublock`: lock, attack, verify and analyze gate-level netlists.
//!
//! | code | meaning |
//! |------|---------|
//! | 0  | success; for `attack`, no correct key was recovered |
//! | 1  | I/O, parse or usage error |
//! | 2  | `lock`: not enough disjoint sub-circuits for the key budget |
//! | 3  | `lock`: activated design differs from the input |
//! | 4  | `attack`/`verify`: iteration or time budget exhausted |
//! | 5  | `verify`: activated design differs from the original |
//! | 6  | `verify`: a single key unlocks every input |
//! | 10 | `attack`: a correct key was recovered |

mod args;
mod commands;
mod exit;
mod formats;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use exit::Exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Failure as u8),
            };
        }
    };
    let result = match &cli.command {
        Command::Lock(a) => commands::lock::run(a),
        Command::Attack(a) => commands::attack::run(a),
        Command::Verify(a) => commands::verify::run(a),
        Command::Analyze(a) => commands::analyze::run(a),
        Command::Report(a) => commands::report::run(a),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sublock: {e}");
            e.code()
        }
    };
    ExitCode::from(code as u8)
}
