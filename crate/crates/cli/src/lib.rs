//! Command-line front end: generate and load matrices, simulate kernels,
//! verify against the oracle, benchmark, and sweep into CSV.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod record;

use args::{Cli, Command};
use error::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => commands::cmd_gen(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Verify(a) => commands::cmd_verify(a),
        Command::Bench(a) => commands::cmd_bench(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
    }
}
