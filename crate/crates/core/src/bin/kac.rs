use std::io;
use std::process::ExitCode;

use kac::cli::{run, ExactVerifier};

fn main() -> ExitCode {
    let code = run(
        std::env::args_os(),
        &ExactVerifier,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code)
}
