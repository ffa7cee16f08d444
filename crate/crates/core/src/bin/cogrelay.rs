use std::process::ExitCode;

fn main() -> ExitCode {
    cogrelay::cli::main_with_args(std::env::args_os())
}
