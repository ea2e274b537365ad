//! Recorded worker transcripts: record once against a real worker, then
//! replay the outcomes without any worker at all.
//!
//! A transcript is JSON lines of `{api, case_index, args_sha256, outcome}`
//! sorted by `(api, case_index)`. The argument digest ties each outcome to
//! the exact case it was produced for, so replaying against a generator
//! that drifted fails loudly instead of silently.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Executor, OrchestratorError, Outcome};
use crate::generation::TestCase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptEntry {
    pub api: String,
    pub case_index: u64,
    pub args_sha256: String,
    pub outcome: Outcome,
}

/// Hex SHA-256 of the case's positional arguments as sent on the wire.
pub fn args_sha256(case: &TestCase) -> String {
    let args: Vec<_> = case.args.values().collect();
    let json = serde_json::to_vec(&args).expect("values always serialize");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn to_jsonl(&self) -> String {
        let mut entries = self.entries.clone();
        entries.sort_by(|a, b| (&a.api, a.case_index).cmp(&(&b.api, b.case_index)));
        entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("entries always serialize") + "\n")
            .collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, OrchestratorError> {
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| OrchestratorError::Malformed {
                    what: format!("transcript line {}", i + 1),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Transcript { entries })
    }

    pub fn load(path: &Path) -> Result<Self, OrchestratorError> {
        let text = std::fs::read_to_string(path).map_err(|e| OrchestratorError::io(path, e))?;
        Self::from_jsonl(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), OrchestratorError> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| OrchestratorError::io(path, e))
    }
}

/// Answers cases from a transcript.
#[derive(Debug, Clone)]
pub struct ReplayExecutor {
    entries: Arc<HashMap<(String, u64), (String, Outcome)>>,
}

impl ReplayExecutor {
    pub fn new(t: &Transcript) -> Self {
        let entries = t
            .entries
            .iter()
            .map(|e| {
                (
                    (e.api.clone(), e.case_index),
                    (e.args_sha256.clone(), e.outcome.clone()),
                )
            })
            .collect();
        ReplayExecutor {
            entries: Arc::new(entries),
        }
    }
}

impl Executor for ReplayExecutor {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError> {
        let key = (case.api_name.clone(), case.case_index);
        let (digest, outcome) = self.entries.get(&key).ok_or_else(|| OrchestratorError::ReplayMissing {
            api: case.api_name.clone(),
            case_index: case.case_index,
        })?;
        if *digest != args_sha256(case) {
            return Err(OrchestratorError::ReplayMismatch {
                api: case.api_name.clone(),
                case_index: case.case_index,
            });
        }
        Ok(outcome.clone())
    }
}

/// Wraps an executor and appends every outcome to a shared transcript.
pub struct RecordingExecutor<E> {
    inner: E,
    sink: Arc<Mutex<Transcript>>,
}

impl<E: Executor> RecordingExecutor<E> {
    pub fn new(inner: E, sink: Arc<Mutex<Transcript>>) -> Self {
        RecordingExecutor { inner, sink }
    }
}

impl<E: Executor> Executor for RecordingExecutor<E> {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError> {
        let outcome = self.inner.execute(case)?;
        self.sink
            .lock()
            .expect("transcript lock")
            .entries
            .push(TranscriptEntry {
                api: case.api_name.clone(),
                case_index: case.case_index,
                args_sha256: args_sha256(case),
                outcome: outcome.normalized(),
            });
        Ok(outcome)
    }

    fn restarts(&self) -> u64 {
        self.inner.restarts()
    }
}
