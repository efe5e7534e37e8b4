use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nugap_cli::{run, Cli};

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved for
    // inconclusive verdicts here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (stdout, failure) = match run(cli) {
        Ok(done) => (done.stdout, done.failure),
        Err(e) => (None, Some(e)),
    };
    if let Some(bytes) = stdout {
        if let Err(e) = std::io::stdout().write_all(&bytes) {
            eprintln!("nugap: {e}");
            return ExitCode::from(1);
        }
    }
    match failure {
        Some(e) => {
            eprintln!("nugap: {e}");
            ExitCode::from(e.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}
