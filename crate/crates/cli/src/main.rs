use clap::Parser;
use gfr_cli::args::Cli;

fn main() {
    if let Err(e) = gfr_cli::run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
