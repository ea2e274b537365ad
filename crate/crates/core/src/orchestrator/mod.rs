//! Campaign execution: workers, the bug oracle, deduplication and reports.

pub mod campaign;
pub mod oracle;
pub mod replay;
pub mod report;
pub mod repro;
pub mod wire;
pub mod worker;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use campaign::{
    run_campaign, ApiSummary, BugReport, CampaignOutcome, CampaignReport, CampaignTiming, VerdictCounts,
};
pub use oracle::{classify, dedup_signature, mask_message, Verdict};
pub use replay::{args_sha256, RecordingExecutor, ReplayExecutor, Transcript, TranscriptEntry};
pub use report::{budget_sweep, load_report, render_table, sweep_csv, write_report};
pub use repro::render_reproducer;
pub use worker::{WorkerCommand, WorkerProcess};

use crate::generation::{GenConfig, TestCase};
use crate::value::EncodedValue;

/// What happened when one case was executed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Outcome {
    Ok {
        outputs: Vec<EncodedValue>,
        nan_detected: bool,
        duration_ms: u64,
    },
    Exception {
        type_name: String,
        message: String,
    },
    Timeout,
    WorkerDeath {
        exit_code: Option<i32>,
        signal: Option<i32>,
    },
    /// The worker exceeded the resident-memory limit and was killed.
    RssExceeded {
        rss_bytes: u64,
    },
}

impl Outcome {
    /// Drops run-to-run noise (durations) so outcomes can be compared and
    /// stored deterministically.
    pub fn normalized(&self) -> Outcome {
        match self {
            Outcome::Ok {
                outputs, nan_detected, ..
            } => Outcome::Ok {
                outputs: outputs.clone(),
                nan_detected: *nan_detected,
                duration_ms: 0,
            },
            other => other.clone(),
        }
    }

    /// True if the worker is gone after this outcome.
    pub fn kills_worker(&self) -> bool {
        matches!(
            self,
            Outcome::Timeout | Outcome::WorkerDeath { .. } | Outcome::RssExceeded { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutionResult {
    pub case_index: u64,
    pub outcome: Outcome,
}

/// The library a campaign drives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    Mock,
    Module(String),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Mock => f.write_str("mock"),
            Target::Module(m) => write!(f, "module:{m}"),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mock" => Ok(Target::Mock),
            _ => match s.strip_prefix("module:") {
                Some(m) if !m.is_empty() && m.split('.').all(crate::schema::is_identifier) => {
                    Ok(Target::Module(m.to_string()))
                }
                _ => Err(format!("invalid target `{s}` (expected `mock` or `module:<name>`)")),
            },
        }
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_RSS_LIMIT: u64 = 2 << 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub gen: GenConfig,
    pub target: Target,
    pub timeout_ms: u64,
    pub parallel_workers: usize,
    /// Exception types treated as graceful rejection of adversarial input.
    pub allowlist: Vec<String>,
    pub rss_limit_bytes: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            gen: GenConfig::default(),
            target: Target::Mock,
            timeout_ms: 10_000,
            parallel_workers: 1,
            allowlist: vec!["TypeError".into(), "ValueError".into(), "OverflowError".into()],
            rss_limit_bytes: DEFAULT_RSS_LIMIT,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), OrchestratorError> {
        self.gen
            .validate()
            .map_err(|e| OrchestratorError::Config(e.to_string()))?;
        if self.timeout_ms < 1 {
            return Err(OrchestratorError::Config("timeout_ms must be at least 1".into()));
        }
        if self.parallel_workers < 1 {
            return Err(OrchestratorError::Config("parallel_workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OrchestratorError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error("failed to start worker `{command}`: {reason}")]
    WorkerSpawnFailure { command: String, reason: String },
    #[error("replay transcript has no entry for {api} case {case_index}")]
    ReplayMissing { api: String, case_index: u64 },
    #[error("replay transcript disagrees with the generated case for {api} case {case_index}")]
    ReplayMismatch { api: String, case_index: u64 },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what}: {reason}")]
    Malformed { what: String, reason: String },
}

impl OrchestratorError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        OrchestratorError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Something that runs test cases: a worker process, a replay transcript,
/// or an in-process stand-in.
pub trait Executor: Send {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError>;

    /// Number of times the underlying worker was (re)started.
    fn restarts(&self) -> u64 {
        0
    }
}

impl<E: Executor + ?Sized> Executor for Box<E> {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError> {
        (**self).execute(case)
    }

    fn restarts(&self) -> u64 {
        (**self).restarts()
    }
}

/// Creates one executor per campaign lane.
pub trait ExecutorFactory: Sync {
    fn create(&self) -> Result<Box<dyn Executor>, OrchestratorError>;
}

impl<F> ExecutorFactory for F
where
    F: Fn() -> Result<Box<dyn Executor>, OrchestratorError> + Sync,
{
    fn create(&self) -> Result<Box<dyn Executor>, OrchestratorError> {
        self()
    }
}
