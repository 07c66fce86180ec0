use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(onebit_mimo::cli::cli_main(std::env::args_os()) as u8)
}
