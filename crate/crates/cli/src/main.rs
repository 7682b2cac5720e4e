use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lcx_cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = std::env::var("LCX_SEED").ok();
    let mut stdout = std::io::stdout().lock();
    let result = run(cli, seed.as_deref(), &mut stdout);
    let _ = stdout.flush();
    match result {
        Ok(Outcome::Holds) => ExitCode::SUCCESS,
        Ok(Outcome::Fails) => ExitCode::from(1),
        Err(e) => {
            eprintln!("lcx: {e}");
            ExitCode::from(2)
        }
    }
}
