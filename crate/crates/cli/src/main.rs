use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use orbitfin_cli::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let report = run(&cli);
    let _ = std::io::stdout().write_all(report.render(cli.format).as_bytes());
    ExitCode::from(report.exit_code as u8)
}
