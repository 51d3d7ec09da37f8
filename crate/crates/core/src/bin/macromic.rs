use std::process::ExitCode;

fn main() -> ExitCode {
    macromic::cli::main()
}
