//! Library side of the `gfr` command: argument types, the four
//! subcommands and their report formats.

pub mod args;
pub mod diagnose;
pub mod error;
pub mod generate;
pub mod screen;
pub mod simulate;

use std::io::Write;
use std::path::Path;

pub use error::{CliError, Result};

use args::{Cli, Command};

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Screen(a) => {
            let report = with_threads(a.threads.threads, || screen::cmd_screen(&a))??;
            emit(a.output.out.as_deref(), screen::render(&report, a.output.format)?.as_bytes())
        }
        Command::Simulate(a) => {
            let report = with_threads(a.threads.threads, || simulate::cmd_simulate(&a))??;
            emit(a.output.out.as_deref(), simulate::render(&report, a.output.format)?.as_bytes())
        }
        Command::Diagnose(a) => {
            let report = with_threads(a.threads.threads, || diagnose::cmd_diagnose(&a))??;
            emit(a.out.as_deref(), (serde_json::to_string_pretty(&report)? + "\n").as_bytes())
        }
        Command::Generate(a) => emit(a.out.as_deref(), &generate::cmd_generate(&a)?),
    }
}
