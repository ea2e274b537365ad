use std::io::{self, BufRead, Write};
use std::time::{Duration, Instant};

use docfuzz_core::orchestrator::wire::{self, Handshake, Response};

use crate::{call, nan_scan, MockOutcome, TARGET_NAME};

/// The worker side of the wire protocol for the mock target.
///
/// Emits the handshake, then answers each request line in order until EOF.
/// Aborts, hangs and exits requested by the mock really happen to this
/// process; only the supervisor turns them into outcomes.
pub fn serve<R: BufRead, W: Write>(input: R, mut output: W) -> io::Result<()> {
    output.write_all(wire::to_line(&Handshake::ready(TARGET_NAME)).as_bytes())?;
    output.flush()?;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match wire::parse_request(&line) {
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id")?.as_u64())
                    .unwrap_or(0);
                Response::exception(id, "ProtocolError", &e.to_string(), 0)
            }
            Ok(req) => {
                let start = Instant::now();
                let outcome = call(&req.api, &req.args);
                let ms = start.elapsed().as_millis() as u64;
                match outcome {
                    MockOutcome::Return(outputs) => {
                        let nan = nan_scan(&outputs);
                        Response::ok(req.id, outputs, nan, ms)
                    }
                    MockOutcome::Raise { type_name, message } => Response::exception(req.id, &type_name, &message, ms),
                    MockOutcome::Abort => {
                        output.flush()?;
                        std::process::abort()
                    }
                    MockOutcome::Exit(code) => {
                        output.flush()?;
                        std::process::exit(code)
                    }
                    MockOutcome::Hang => loop {
                        std::thread::sleep(Duration::from_secs(3600));
                    },
                }
            }
        };
        output.write_all(wire::to_line(&reply).as_bytes())?;
        output.flush()?;
    }
    Ok(())
}
