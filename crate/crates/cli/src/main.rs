use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use pdp_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // one write, so a reader never sees half a document
            let _ = stdout.write_all(format!("{}\n", out.stdout).as_bytes());
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("pdp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
