use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mmwave_d2d::cli::{error_record, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| {
        match &out.out {
            Some(path) => std::fs::write(path, &out.body)?,
            None => std::io::stdout().write_all(out.body.as_bytes())?,
        }
        eprintln!("{}", out.manifest);
        Ok(())
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            ExitCode::from(if e.kind() == "config" { 2 } else { 1 })
        }
    }
}
