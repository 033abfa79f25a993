use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = match qms_cli::run(std::env::args_os()) {
        Ok((code, report)) => (code, serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"),
        Err(help) => (0, help),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(code as u8)
}
