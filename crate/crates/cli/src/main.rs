use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let now = std::env::var(laisc_cli::NOW_VAR).ok();
    let out = laisc_cli::run(std::env::args_os(), now.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
