use std::process::ExitCode;

fn main() -> ExitCode {
    twistor::cli::main_with_args(std::env::args_os())
}
