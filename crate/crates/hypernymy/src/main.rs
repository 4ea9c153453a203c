use std::process::ExitCode;

fn main() -> ExitCode {
    hypernymy::cli::main_entry()
}
