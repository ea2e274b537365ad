//! The bug oracle and deduplication signatures.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{CampaignConfig, ExecutionResult, Outcome};
use crate::generation::{TestCase, ValidityMode};
use crate::value::EncodedValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    CrashBug,
    NanBug,
    ExceptionBug,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [Verdict::Pass, Verdict::CrashBug, Verdict::NanBug, Verdict::ExceptionBug];

    pub fn is_bug(self) -> bool {
        self != Verdict::Pass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::CrashBug => "crash_bug",
            Verdict::NanBug => "nan_bug",
            Verdict::ExceptionBug => "exception_bug",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lower-cased fragments that mark an exception as an internal fault
/// rather than a graceful rejection.
pub const INTERNAL_FAULT_MARKERS: &[&str] = &[
    "internal_assert",
    "assertion failed",
    "assert",
    "segmentation fault",
    "sigsegv",
    "sigabrt",
    "sigbus",
    "core dumped",
    "stack smashing",
    "abort",
];

pub fn looks_internal(type_name: &str, message: &str) -> bool {
    let text = format!("{type_name} {message}").to_lowercase();
    INTERNAL_FAULT_MARKERS.iter().any(|m| text.contains(m))
}

pub fn classify(res: &ExecutionResult, case: &TestCase, cfg: &CampaignConfig) -> Verdict {
    classify_outcome(&res.outcome, case.validity_mode, &cfg.allowlist)
}

pub fn classify_outcome(outcome: &Outcome, mode: ValidityMode, allowlist: &[String]) -> Verdict {
    match (outcome, mode) {
        (Outcome::WorkerDeath { .. } | Outcome::Timeout | Outcome::RssExceeded { .. }, _) => Verdict::CrashBug,
        (Outcome::Ok { nan_detected: true, .. }, ValidityMode::ValidOnly) => Verdict::NanBug,
        (Outcome::Ok { .. }, _) => Verdict::Pass,
        (Outcome::Exception { .. }, ValidityMode::ValidOnly) => Verdict::ExceptionBug,
        (Outcome::Exception { type_name, message }, ValidityMode::Adversarial) => {
            if allowlist.iter().any(|a| a == type_name) {
                Verdict::Pass
            } else if looks_internal(type_name, message) {
                Verdict::ExceptionBug
            } else {
                Verdict::Pass
            }
        }
    }
}

static MASKABLE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"0[xX][0-9a-fA-F]+|[0-9]+").unwrap());

/// First line of `message` with hex addresses (`0x?`) and other digit runs
/// (`#`) masked.
pub fn mask_message(message: &str) -> String {
    let first = message.lines().next().unwrap_or("").trim();
    MASKABLE
        .replace_all(first, |c: &regex::Captures<'_>| {
            if c[0].len() > 1 && c[0][1..2].eq_ignore_ascii_case("x") {
                "0x?"
            } else {
                "#"
            }
        })
        .into_owned()
}

fn opt(v: Option<i32>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Indices of outputs holding a NaN or infinity, comma-separated.
fn nan_pattern(outputs: &[EncodedValue]) -> String {
    let idx: Vec<String> = outputs
        .iter()
        .enumerate()
        .filter(|(_, v)| v.has_non_finite())
        .map(|(i, _)| i.to_string())
        .collect();
    if idx.is_empty() {
        "?".into()
    } else {
        idx.join(",")
    }
}

/// Deduplication key for a result. Defined for every outcome; passing
/// outcomes map to `"ok"`.
pub fn dedup_signature(res: &ExecutionResult) -> String {
    match &res.outcome {
        Outcome::WorkerDeath { exit_code, signal } => format!("exit:{}|signal:{}", opt(*exit_code), opt(*signal)),
        Outcome::Timeout => "timeout".into(),
        Outcome::RssExceeded { .. } => "rss-limit".into(),
        Outcome::Exception { type_name, message } => format!("{type_name}: {}", mask_message(message)),
        Outcome::Ok {
            nan_detected: true,
            outputs,
            ..
        } => format!("nan:{}", nan_pattern(outputs)),
        Outcome::Ok { .. } => "ok".into(),
    }
}
