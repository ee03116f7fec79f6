use std::io;
use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;

use qstep::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("QSTEP_LOG", "warn")).init();
    let cli = Cli::parse();
    let code = run(cli, &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}
