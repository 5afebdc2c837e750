use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (out, code) = hypertrans::cli::run_command(std::env::args_os());
    // clap diagnostics go to stderr, reports to stdout; a closed pipe is not an error
    let _ = if code == 1 && !out.trim_start().starts_with('{') {
        writeln!(std::io::stderr(), "{}", out.trim_end())
    } else {
        writeln!(std::io::stdout(), "{}", out.trim_end())
    };
    ExitCode::from(code as u8)
}
