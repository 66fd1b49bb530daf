use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use slidewin_cli::{run, Cli};

fn main() -> ExitCode {
    // clap reports its own parse errors; help and version are not failures.
    if let Err(e) = Cli::try_parse() {
        let _ = e.print();
        return match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
            _ => ExitCode::from(1),
        };
    }
    let mut stdout = std::io::stdout().lock();
    match run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slidewin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
