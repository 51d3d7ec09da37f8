//! Drive the command-line layer as a library: build the `fig2` table and print a few rows.

use clap::Parser;
use macromic::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse_from(["macromic", "fig2", "--k", "1,3", "--r", "0.25:1:4"]);
    match execute(&cli) {
        Ok(out) => print!("{}", out.text),
        Err(e) => eprintln!("{e}"),
    }
}
