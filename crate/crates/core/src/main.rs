use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qmlbk::cli::run() as u8)
}
