//! Command-line front end for `rwalk-core`: tables of the closed-form,
//! grid and large-N laws, Monte-Carlo samples, and model-versus-sample
//! comparisons, as CSV or JSON.

pub mod args;
pub mod commands;
pub mod failure;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use args::{Cli, Command, Format};
use failure::Failure;

/// Runs the CLI on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::parse(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match args::clap_failure(e) {
                None => 0,
                Some(f) => {
                    eprintln!("{f}");
                    f.exit_code()
                }
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        // a pool built earlier in this process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let doc = commands::dispatch(&cli.command)?;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Compare(_) => Format::Json,
        _ => Format::Csv,
    });
    let text = doc.render(format);
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
