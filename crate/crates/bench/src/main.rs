use std::process::ExitCode;

fn main() -> ExitCode {
    kelly_bench::run(std::env::args_os())
}
