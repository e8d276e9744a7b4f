use std::process::ExitCode;

fn main() -> ExitCode {
    qdelta::cli::main_with_args(std::env::args_os())
}
