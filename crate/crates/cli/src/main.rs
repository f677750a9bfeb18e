use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sagin_psc::run_cli(std::env::args_os()))
}
