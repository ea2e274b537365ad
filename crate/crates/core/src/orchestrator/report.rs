//! Report persistence and rendering.
//!
//! Layout under the output directory:
//!
//! ```text
//! campaign.json          deterministic summary (same config => same bytes)
//! timing.json            wall times and worker restarts
//! bugs/<api>-<n>.json    one BugReport each
//! repro/<api>-<n>.py     standalone reproducer scripts
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::campaign::{CampaignOutcome, CampaignReport};
use super::repro::render_reproducer;
use super::{OrchestratorError, Target};

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports always serialize") + "\n"
}

fn write(path: &Path, text: &str) -> Result<(), OrchestratorError> {
    fs::write(path, text).map_err(|e| OrchestratorError::io(path, e))
}

/// Removes files with `ext` left in `dir` by an earlier campaign.
fn clear_stale(dir: &Path, ext: &str) -> Result<(), OrchestratorError> {
    let entries = fs::read_dir(dir).map_err(|e| OrchestratorError::io(dir, e))?;
    for entry in entries.flatten() {
        let p = entry.path();
        if p.is_file() && p.extension().is_some_and(|x| x == ext) {
            fs::remove_file(&p).map_err(|e| OrchestratorError::io(&p, e))?;
        }
    }
    Ok(())
}

pub fn write_report(dir: &Path, outcome: &CampaignOutcome, timeout_ms: u64) -> Result<(), OrchestratorError> {
    let report = &outcome.report;
    let target: Target = report.target.parse().map_err(|reason| OrchestratorError::Malformed {
        what: "report target".into(),
        reason,
    })?;
    let bugs_dir = dir.join("bugs");
    let repro_dir = dir.join("repro");
    for d in [dir, &bugs_dir, &repro_dir] {
        fs::create_dir_all(d).map_err(|e| OrchestratorError::io(d, e))?;
    }
    clear_stale(&bugs_dir, "json")?;
    clear_stale(&repro_dir, "py")?;
    write(&dir.join("campaign.json"), &pretty(report))?;
    write(&dir.join("timing.json"), &pretty(&outcome.timing))?;
    for bug in &report.bugs {
        write(&bugs_dir.join(format!("{}.json", bug.id)), &pretty(bug))?;
        write(
            &dir.join(&bug.reproducer_path),
            &render_reproducer(bug, &target, timeout_ms),
        )?;
    }
    Ok(())
}

/// Reads `campaign.json` from a report directory (or the file itself).
pub fn load_report(path: &Path) -> Result<CampaignReport, OrchestratorError> {
    let file: PathBuf = if path.is_dir() {
        path.join("campaign.json")
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&file).map_err(|e| OrchestratorError::io(&file, e))?;
    serde_json::from_str(&text).map_err(|e| OrchestratorError::Malformed {
        what: file.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn render_table(report: &CampaignReport) -> String {
    let width = report.apis.iter().map(|a| a.api_name.len()).max().unwrap_or(3).max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>6}  {:>5}  {:>5}  {:>9}  {:>4}",
        "api", "cases", "valid", "pass", "crash", "nan", "exception", "bugs"
    );
    for a in &report.apis {
        let v = &a.verdicts;
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>6}  {:>5}  {:>5}  {:>9}  {:>4}",
            a.api_name, a.cases_executed, a.valid_cases, v.pass, v.crash_bug, v.nan_bug, v.exception_bug, a.bugs
        );
    }
    let _ = writeln!(
        out,
        "\ntarget {}  seed {}  budget {}/api  cases {}  generation success rate {:.2}%",
        report.target,
        report.seed,
        report.budget_per_api,
        report.cases_executed,
        report.generation_success_rate * 100.0
    );
    if report.bugs.is_empty() {
        out.push_str("no bugs found\n");
    } else {
        let _ = writeln!(out, "{} bugs:", report.bugs.len());
        for b in &report.bugs {
            let _ = writeln!(
                out,
                "  {:<24} {:<13} x{:<4} first at case {:<4} {}",
                b.id, b.verdict, b.occurrences, b.first_case.case_index, b.signature
            );
        }
    }
    out
}

/// Sweep points: 1, every multiple of 50, and the full budget.
pub fn default_sweep_budgets(budget: usize) -> Vec<usize> {
    let mut b: Vec<usize> = std::iter::once(1)
        .chain((50..budget).step_by(50))
        .chain([budget])
        .collect();
    b.dedup();
    b
}

/// Distinct bugs found within the first `b` cases of every API, for each
/// budget `b`. Exact for any smaller budget because case streams are
/// prefix-closed.
pub fn budget_sweep(report: &CampaignReport, budgets: &[usize]) -> Vec<(usize, usize)> {
    budgets
        .iter()
        .map(|&b| {
            let found = report
                .bugs
                .iter()
                .filter(|bug| (bug.first_case.case_index as usize) < b)
                .count();
            (b, found)
        })
        .collect()
}

pub fn sweep_csv(points: &[(usize, usize)]) -> String {
    let mut out = String::from("cases_per_api,cumulative_bugs\n");
    for (b, n) in points {
        let _ = writeln!(out, "{b},{n}");
    }
    out
}
