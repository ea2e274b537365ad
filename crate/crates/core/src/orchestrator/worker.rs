//! Supervision of one worker process speaking the wire protocol.
//!
//! The worker is spawned lazily, handshakes, then answers one request per
//! line. Anything other than a well-formed reply within the timeout ends the
//! process: EOF becomes `WorkerDeath` with the exit status, silence becomes
//! `Timeout`, a garbled reply becomes `WorkerDeath` with no status. The next
//! case starts a fresh worker.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, ExitStatus, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::wire::{self, Request};
use super::{Executor, OrchestratorError, Outcome, Target};
use crate::generation::TestCase;

/// How to start a worker: `program args... --target <target>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl WorkerCommand {
    pub fn new(program: impl Into<String>, target: &Target) -> Self {
        WorkerCommand {
            program: program.into(),
            args: vec!["--target".into(), target.to_string()],
        }
    }

    fn display(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct Live {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

pub struct WorkerProcess {
    cmd: WorkerCommand,
    timeout: Duration,
    handshake_timeout: Duration,
    rss_limit: u64,
    live: Option<Live>,
    next_id: u64,
    starts: u64,
}

impl WorkerProcess {
    pub fn new(cmd: WorkerCommand, timeout_ms: u64, rss_limit: u64) -> Self {
        WorkerProcess {
            cmd,
            timeout: Duration::from_millis(timeout_ms),
            handshake_timeout: Duration::from_millis(timeout_ms.max(10_000)),
            rss_limit,
            live: None,
            next_id: 0,
            starts: 0,
        }
    }

    fn spawn_failure(&self, reason: impl ToString) -> OrchestratorError {
        OrchestratorError::WorkerSpawnFailure {
            command: self.cmd.display(),
            reason: reason.to_string(),
        }
    }

    fn spawn(&mut self) -> Result<(), OrchestratorError> {
        let mut child = Command::new(&self.cmd.program)
            .args(&self.cmd.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| self.spawn_failure(e))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let stderr = child.stderr.take().expect("piped stderr");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let pid = child.id();
        thread::spawn(move || {
            for line in BufReader::new(stderr).lines().map_while(Result::ok) {
                tracing::debug!(worker_pid = pid, "{line}");
            }
        });
        let mut live = Live {
            child,
            stdin,
            lines: rx,
        };
        match live.lines.recv_timeout(self.handshake_timeout) {
            Ok(line) => {
                if let Err(e) = wire::parse_handshake(&line) {
                    kill(&mut live.child);
                    return Err(self.spawn_failure(e));
                }
            }
            Err(_) => {
                let status = wait_briefly(&mut live.child);
                return Err(self.spawn_failure(format!("no handshake (exit status {status:?})")));
            }
        }
        self.starts += 1;
        tracing::debug!(worker_pid = pid, starts = self.starts, "worker ready");
        self.live = Some(live);
        Ok(())
    }

    fn death(&mut self) -> Outcome {
        let mut live = self.live.take().expect("worker is live");
        let status = wait_briefly(&mut live.child);
        death_outcome(status)
    }

    fn discard(&mut self) {
        if let Some(mut live) = self.live.take() {
            kill(&mut live.child);
        }
    }
}

fn kill(child: &mut Child) {
    let _ = child.kill();
    let _ = child.wait();
}

/// Waits up to a second for the child to exit, killing it afterwards.
fn wait_briefly(child: &mut Child) -> Option<ExitStatus> {
    let deadline = Instant::now() + Duration::from_secs(1);
    loop {
        match child.try_wait() {
            Ok(Some(s)) => return Some(s),
            Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
            _ => {
                kill(child);
                return None;
            }
        }
    }
}

fn death_outcome(status: Option<ExitStatus>) -> Outcome {
    let Some(status) = status else {
        return Outcome::WorkerDeath {
            exit_code: None,
            signal: None,
        };
    };
    #[cfg(unix)]
    let signal = std::os::unix::process::ExitStatusExt::signal(&status);
    #[cfg(not(unix))]
    let signal = None;
    Outcome::WorkerDeath {
        exit_code: status.code(),
        signal,
    }
}

/// Resident set size of a process in bytes, where the platform exposes it.
fn rss_bytes(pid: u32) -> Option<u64> {
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

impl Executor for WorkerProcess {
    fn execute(&mut self, case: &TestCase) -> Result<Outcome, OrchestratorError> {
        if self.live.is_none() {
            self.spawn()?;
        }
        self.next_id += 1;
        let id = self.next_id;
        let line = wire::to_line(&Request::call(id, case, self.timeout.as_millis() as u64));
        let live = self.live.as_mut().expect("spawned above");
        if live
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| live.stdin.flush())
            .is_err()
        {
            return Ok(self.death());
        }
        match live.lines.recv_timeout(self.timeout) {
            Ok(reply) => match wire::parse_response(&reply, id) {
                Ok(resp) => {
                    let pid = live.child.id();
                    if let Some(rss) = rss_bytes(pid).filter(|r| *r > self.rss_limit) {
                        self.discard();
                        return Ok(Outcome::RssExceeded { rss_bytes: rss });
                    }
                    Ok(match resp.status {
                        wire::Status::Ok => Outcome::Ok {
                            outputs: resp.outputs.unwrap_or_default(),
                            nan_detected: resp.nan_detected.unwrap_or(false),
                            duration_ms: resp.duration_ms,
                        },
                        wire::Status::Exception => {
                            let e = resp.exception.expect("checked by parse_response");
                            Outcome::Exception {
                                type_name: e.type_name,
                                message: e.message,
                            }
                        }
                    })
                }
                Err(e) => {
                    tracing::warn!(api = %case.api_name, case_index = case.case_index, error = %e, "protocol violation; restarting worker");
                    self.discard();
                    Ok(Outcome::WorkerDeath {
                        exit_code: None,
                        signal: None,
                    })
                }
            },
            Err(RecvTimeoutError::Timeout) => {
                tracing::warn!(api = %case.api_name, case_index = case.case_index, "worker timed out; restarting");
                self.discard();
                Ok(Outcome::Timeout)
            }
            Err(RecvTimeoutError::Disconnected) => Ok(self.death()),
        }
    }

    fn restarts(&self) -> u64 {
        self.starts.saturating_sub(1)
    }
}

impl Drop for WorkerProcess {
    fn drop(&mut self) {
        self.discard();
    }
}
