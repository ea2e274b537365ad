//! The campaign driver: streams every API's cases through an executor,
//! classifies outcomes and folds bugs into deduplicated reports.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::oracle::{classify, dedup_signature, Verdict};
use super::{CampaignConfig, ExecutionResult, Executor, ExecutorFactory, OrchestratorError, Outcome};
use crate::constraint_engine::ApiConstraintSet;
use crate::generation::{case_stream, StrategyFlags, TestCase, ValidityMode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictCounts {
    pub pass: u64,
    pub crash_bug: u64,
    pub nan_bug: u64,
    pub exception_bug: u64,
}

impl VerdictCounts {
    pub fn add(&mut self, v: Verdict) {
        *match v {
            Verdict::Pass => &mut self.pass,
            Verdict::CrashBug => &mut self.crash_bug,
            Verdict::NanBug => &mut self.nan_bug,
            Verdict::ExceptionBug => &mut self.exception_bug,
        } += 1;
    }

    pub fn merge(&mut self, o: &VerdictCounts) {
        self.pass += o.pass;
        self.crash_bug += o.crash_bug;
        self.nan_bug += o.nan_bug;
        self.exception_bug += o.exception_bug;
    }

    pub fn total(&self) -> u64 {
        self.pass + self.crash_bug + self.nan_bug + self.exception_bug
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiSummary {
    pub api_name: String,
    pub cases_executed: u64,
    pub valid_cases: u64,
    /// ValidOnly cases that ended in neither a crash nor an exception bug.
    pub valid_accepted: u64,
    pub verdicts: VerdictCounts,
    pub bugs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BugReport {
    /// `<api>-<n>`, numbered per API in discovery order from 1.
    pub id: String,
    pub api_name: String,
    pub verdict: Verdict,
    pub signature: String,
    pub first_case: TestCase,
    pub occurrences: u64,
    pub outcome: Outcome,
    pub reproducer_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignReport {
    pub target: String,
    pub seed: u64,
    pub budget_per_api: usize,
    pub strategy_flags: StrategyFlags,
    pub cases_executed: u64,
    pub valid_cases: u64,
    pub generation_success_rate: f64,
    pub verdicts: VerdictCounts,
    pub apis: Vec<ApiSummary>,
    pub bugs: Vec<BugReport>,
}

impl CampaignReport {
    pub fn bug_keys(&self) -> Vec<(String, Verdict, String)> {
        self.bugs
            .iter()
            .map(|b| (b.api_name.clone(), b.verdict, b.signature.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiTiming {
    pub api_name: String,
    pub wall_time_ms: u64,
    pub worker_restarts: u64,
}

/// Run-dependent measurements, kept apart from the deterministic report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignTiming {
    pub wall_time_ms: u64,
    pub lanes: usize,
    pub apis: Vec<ApiTiming>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub report: CampaignReport,
    pub timing: CampaignTiming,
}

struct ApiRun {
    summary: ApiSummary,
    bugs: Vec<BugReport>,
    timing: ApiTiming,
}

pub fn file_stem(api: &str) -> String {
    api.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

fn run_api(cs: &ApiConstraintSet, cfg: &CampaignConfig, exec: &mut dyn Executor) -> Result<ApiRun, OrchestratorError> {
    let start = Instant::now();
    let restarts_before = exec.restarts();
    let mut counts = VerdictCounts::default();
    let (mut executed, mut valid, mut accepted) = (0u64, 0u64, 0u64);
    let mut bugs: IndexMap<(Verdict, String), BugReport> = IndexMap::new();
    for case in case_stream(cs, &cfg.gen) {
        let outcome = exec.execute(&case)?;
        let res = ExecutionResult {
            case_index: case.case_index,
            outcome,
        };
        let verdict = classify(&res, &case, cfg);
        executed += 1;
        counts.add(verdict);
        if case.validity_mode == ValidityMode::ValidOnly {
            valid += 1;
            if !matches!(verdict, Verdict::CrashBug | Verdict::ExceptionBug) {
                accepted += 1;
            }
        }
        if !verdict.is_bug() {
            continue;
        }
        let signature = dedup_signature(&res);
        if let Some(b) = bugs.get_mut(&(verdict, signature.clone())) {
            b.occurrences += 1;
            continue;
        }
        tracing::info!(api = %cs.api_name, case_index = case.case_index, %verdict, %signature, "new bug");
        let id = format!("{}-{}", file_stem(&cs.api_name), bugs.len() + 1);
        bugs.insert(
            (verdict, signature.clone()),
            BugReport {
                reproducer_path: format!("repro/{id}.py"),
                id,
                api_name: cs.api_name.clone(),
                verdict,
                signature,
                first_case: case,
                occurrences: 1,
                outcome: res.outcome.normalized(),
            },
        );
    }
    let timing = ApiTiming {
        api_name: cs.api_name.clone(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        worker_restarts: exec.restarts() - restarts_before,
    };
    tracing::info!(api = %cs.api_name, cases = executed, bugs = bugs.len(), "api finished");
    Ok(ApiRun {
        summary: ApiSummary {
            api_name: cs.api_name.clone(),
            cases_executed: executed,
            valid_cases: valid,
            valid_accepted: accepted,
            verdicts: counts,
            bugs: bugs.len(),
        },
        bugs: bugs.into_values().collect(),
        timing,
    })
}

/// Fuzzes every API with `budget_per_api` cases.
///
/// `parallel_workers` lanes each own one executor and take whole APIs from
/// a shared queue, so an API's cases always run in order on one worker.
/// The report lists APIs in input order regardless of which lane ran them.
pub fn run_campaign(
    sets: &[ApiConstraintSet],
    cfg: &CampaignConfig,
    factory: &dyn ExecutorFactory,
) -> Result<CampaignOutcome, OrchestratorError> {
    cfg.validate()?;
    let start = Instant::now();
    let lanes = cfg.parallel_workers.min(sets.len()).max(1);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let runs: Mutex<Vec<Option<ApiRun>>> = Mutex::new((0..sets.len()).map(|_| None).collect());
    let failure: Mutex<Option<OrchestratorError>> = Mutex::new(None);
    let fail = |e: OrchestratorError| {
        stop.store(true, Ordering::SeqCst);
        failure.lock().expect("failure lock").get_or_insert(e);
    };

    thread::scope(|s| {
        for _ in 0..lanes {
            s.spawn(|| {
                let mut exec = match factory.create() {
                    Ok(e) => e,
                    Err(e) => return fail(e),
                };
                while !stop.load(Ordering::SeqCst) {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(cs) = sets.get(i) else { break };
                    match run_api(cs, cfg, &mut exec) {
                        Ok(run) => runs.lock().expect("runs lock")[i] = Some(run),
                        Err(e) => return fail(e),
                    }
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e);
    }

    let runs: Vec<ApiRun> = runs
        .into_inner()
        .expect("runs lock")
        .into_iter()
        .map(|r| r.expect("every api ran"))
        .collect();
    let mut verdicts = VerdictCounts::default();
    let (mut executed, mut valid, mut accepted) = (0, 0, 0);
    for r in &runs {
        verdicts.merge(&r.summary.verdicts);
        executed += r.summary.cases_executed;
        valid += r.summary.valid_cases;
        accepted += r.summary.valid_accepted;
    }
    let report = CampaignReport {
        target: cfg.target.to_string(),
        seed: cfg.gen.rng_seed,
        budget_per_api: cfg.gen.budget_per_api,
        strategy_flags: cfg.gen.strategy_flags,
        cases_executed: executed,
        valid_cases: valid,
        generation_success_rate: if valid == 0 {
            1.0
        } else {
            accepted as f64 / valid as f64
        },
        verdicts,
        apis: runs.iter().map(|r| r.summary.clone()).collect(),
        bugs: runs.iter().flat_map(|r| r.bugs.iter().cloned()).collect(),
    };
    let timing = CampaignTiming {
        wall_time_ms: start.elapsed().as_millis() as u64,
        lanes,
        apis: runs.into_iter().map(|r| r.timing).collect(),
    };
    Ok(CampaignOutcome { report, timing })
}
