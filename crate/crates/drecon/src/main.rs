use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;
use drecon::cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                    eprintln!("drecon: <stdout>: {e}");
                    ExitCode::from(drecon::ExitCode::Io as u8)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("drecon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
