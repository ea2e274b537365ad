//! A small stand-in for an image-processing library, with planted faults.
//!
//! Every API accepts what its bundled docstring promises and behaves on
//! such input. Six faults are planted, each reachable through exactly one
//! generation strategy:
//!
//! | API                     | fault                                   | class     | strategy |
//! |-------------------------|-----------------------------------------|-----------|----------|
//! | `pyrDown`               | abort on any dimension >= 4096          | crash     | Size     |
//! | `intersectConvexConvex` | abort when handed a string              | crash     | Type     |
//! | `findHomography`        | inf/NaN for near-degenerate points      | NaN       | Division |
//! | `sqrt`                  | NaN for negative elements               | NaN       | Noise    |
//! | `projectPoints`         | error when input dtypes differ          | exception | Type     |
//! | `integral`              | internal error for elements >= 64       | exception | Mask     |
//!
//! Inputs outside the documented domain are rejected with `TypeError` (wrong
//! kind of value) or `error` (bad shape or size), never with wording that
//! the oracle would read as an internal fault.
//!
//! `debug_*` APIs exercise the harness itself: hangs, exits, fixed
//! exceptions and NaN outputs on demand.

mod apis;
mod executor;
mod serve;

use docfuzz_core::EncodedValue;

pub use executor::InProcessExecutor;
pub use serve::serve;

pub const TARGET_NAME: &str = "mock";

/// What calling a mock API does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockOutcome {
    Return(Vec<EncodedValue>),
    Raise {
        type_name: String,
        message: String,
    },
    /// The process aborts (SIGABRT).
    Abort,
    /// The call never returns.
    Hang,
    Exit(i32),
}

/// Names of the APIs the mock exposes, planted and debug ones included.
pub fn api_names() -> Vec<&'static str> {
    apis::TABLE.iter().map(|(n, _)| *n).collect()
}

pub fn call(api: &str, args: &[EncodedValue]) -> MockOutcome {
    let Some((_, f)) = apis::TABLE.iter().find(|(n, _)| *n == api) else {
        return MockOutcome::Raise {
            type_name: "AttributeError".into(),
            message: format!("module 'mock' has no attribute '{api}'"),
        };
    };
    match f(args) {
        Ok(outputs) => MockOutcome::Return(outputs),
        Err(e) => e,
    }
}

/// True if any output holds a NaN or infinity.
pub fn nan_scan(outputs: &[EncodedValue]) -> bool {
    outputs.iter().any(EncodedValue::has_non_finite)
}
