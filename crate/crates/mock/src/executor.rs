use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use docfuzz_core::orchestrator::{Executor, OrchestratorError, Outcome};
use docfuzz_core::TestCase;

use crate::{call, nan_scan, MockOutcome};

/// Runs mock calls in-process, translating process-fatal behaviour into the
/// outcomes a supervisor would observe from a real worker: abort becomes
/// death by SIGABRT, a hang becomes a timeout, a panic becomes exit 101.
#[derive(Debug, Default)]
pub struct InProcessExecutor {
    deaths: u64,
}

impl InProcessExecutor {
    pub fn new() -> Self {
        Self::default()
    }
}

pub(crate) fn run(api: &str, args: &[docfuzz_core::EncodedValue]) -> Result<MockOutcome, ()> {
    panic::catch_unwind(AssertUnwindSafe(|| call(api, args))).map_err(|_| ())
}

impl Executor for InProcessExecutor {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError> {
        let args: Vec<_> = case.args.values().cloned().collect();
        let start = Instant::now();
        let outcome = match run(&case.api_name, &args) {
            Ok(MockOutcome::Return(outputs)) => Outcome::Ok {
                nan_detected: nan_scan(&outputs),
                outputs,
                duration_ms: start.elapsed().as_millis() as u64,
            },
            Ok(MockOutcome::Raise { type_name, message }) => Outcome::Exception { type_name, message },
            Ok(MockOutcome::Abort) => Outcome::WorkerDeath {
                exit_code: None,
                signal: Some(6),
            },
            Ok(MockOutcome::Hang) => Outcome::Timeout,
            Ok(MockOutcome::Exit(code)) => Outcome::WorkerDeath {
                exit_code: Some(code),
                signal: None,
            },
            Err(()) => Outcome::WorkerDeath {
                exit_code: Some(101),
                signal: None,
            },
        };
        if outcome.kills_worker() {
            self.deaths += 1;
        }
        Ok(outcome)
    }

    fn restarts(&self) -> u64 {
        self.deaths
    }
}
