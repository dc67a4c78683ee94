use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match ifsdim::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                ifsdim::cli::EXIT_VALIDATION
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(ifsdim::cli::run(cli))
}
