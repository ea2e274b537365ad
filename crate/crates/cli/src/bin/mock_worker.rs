//! Wire-protocol worker for the built-in mock target.
//!
//! Invoked as `docfuzz-mock-worker --target mock`, like `docfuzz-worker`.

use std::process::ExitCode;

use clap::Parser;
use docfuzz_core::orchestrator::Target;

#[derive(Debug, Parser)]
#[command(name = "docfuzz-mock-worker", version)]
struct Args {
    #[arg(long)]
    target: Target,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.target != Target::Mock {
        eprintln!("docfuzz-mock-worker only serves --target mock, not {}", args.target);
        return ExitCode::from(2);
    }
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    match docfuzz_mock::serve(stdin.lock(), stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("docfuzz-mock-worker: {e}");
            ExitCode::from(1)
        }
    }
}
