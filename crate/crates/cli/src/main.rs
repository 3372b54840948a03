//! The `hw` binary.

use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = hw_cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(hw_cli::EXIT_USAGE as u8);
    }
    let out = hw_cli::run(std::env::args_os());
    match (&out.envelope, &out.out) {
        (Some(_), Some(path)) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(hw_cli::EXIT_FAIL as u8);
            }
        }
        (Some(_), None) => print!("{}", out.text),
        (None, _) if out.code == hw_cli::EXIT_PASS => print!("{}", out.text),
        (None, _) => eprint!("{}", out.text),
    }
    ExitCode::from(out.code as u8)
}
