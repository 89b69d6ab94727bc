use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use beatty_cli::{run, Cli, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.output {
        Some(path) => File::create(path).map_err(CliError::from).and_then(|f| {
            let mut w = BufWriter::new(f);
            run(&cli, &mut w)?;
            w.flush()?;
            Ok(())
        }),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            let r = run(&cli, &mut w);
            // keep whatever was produced before a failure
            let flushed = w.flush();
            r.and(flushed.map_err(CliError::from))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("beatty: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
