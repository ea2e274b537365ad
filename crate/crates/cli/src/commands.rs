use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use docfuzz_core::constraint_engine::ApiConstraintSet;
use docfuzz_core::doc_parser::{ParsedDoc, RawApiDoc};
use docfuzz_core::enrichment::{standardize_all, EnrichmentBackend, LlmBackend};
use docfuzz_core::orchestrator::campaign::file_stem;
use docfuzz_core::orchestrator::oracle::classify_outcome;
use docfuzz_core::orchestrator::report::default_sweep_budgets;
use docfuzz_core::orchestrator::{
    budget_sweep, dedup_signature, load_report, render_table, run_campaign, sweep_csv, write_report, BugReport,
    CampaignConfig, CampaignOutcome, ExecutionResult, Executor, OrchestratorError, RecordingExecutor, ReplayExecutor,
    Target, Transcript, WorkerCommand, WorkerProcess,
};
use docfuzz_core::par::Parallelism;
use docfuzz_core::pipeline::{extract_all, extract_metrics, parse_corpus, parse_summary, ParseSummary};
use docfuzz_core::schema::StandardizedApiInfo;
use docfuzz_core::{bundled, case_stream};
use docfuzz_mock::InProcessExecutor;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::PipelineConfig;
use crate::{
    Backend, Bundled, CampaignArgs, Cli, Cmd, DocsInput, EnrichArgs, ExtractArgs, FuzzArgs, LlmArgs, ParseArgs,
    PipelineArgs, ReportArgs, ReproArgs,
};

const DEFAULT_WORKER: &str = "docfuzz-worker";

/// What `docfuzz parse` writes.
#[derive(Debug, Serialize, Deserialize)]
struct ParseOutput {
    summary: ParseSummary,
    docs: Vec<ParsedDoc>,
}

pub fn run(cli: Cli, cfg: PipelineConfig) -> Result<u8> {
    let mode = Parallelism::from_flag(!cli.sequential);
    match cli.cmd {
        Cmd::Parse(a) => cmd_parse(a, &cfg, mode),
        Cmd::Enrich(a) => cmd_enrich(a, &cfg, mode),
        Cmd::Extract(a) => cmd_extract(a, &cfg, mode),
        Cmd::Fuzz(a) => cmd_fuzz(a, &cfg),
        Cmd::Report(a) => cmd_report(a, &cfg),
        Cmd::Repro(a) => cmd_repro(a, &cfg),
        Cmd::Pipeline(a) => cmd_pipeline(a, &cfg, mode),
    }
}

fn required(flag: Option<PathBuf>, from_cfg: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| from_cfg.clone())
        .ok_or_else(|| anyhow!("missing --{name} (or paths.{name} in the config file)"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_line(value: &serde_json::Value) {
    println!("{value}");
}

fn load_docs(input: &DocsInput, cfg: &PipelineConfig) -> Result<Vec<RawApiDoc>> {
    match (input.bundled, &input.input) {
        (Some(Bundled::Listings), _) => Ok(bundled::listing_docs()),
        (Some(Bundled::Mock), _) => Ok(bundled::mock_docs()),
        (None, Some(p)) => read_json(p),
        (None, None) => match &cfg.paths.docs {
            Some(p) => read_json(p),
            None => bail!("missing --in or --bundled (or paths.docs in the config file)"),
        },
    }
}

fn parse_stage(docs: &[RawApiDoc], mode: Parallelism) -> ParseOutput {
    let parsed = parse_corpus(docs, mode);
    ParseOutput {
        summary: parse_summary(&parsed),
        docs: parsed,
    }
}

fn cmd_parse(a: ParseArgs, cfg: &PipelineConfig, mode: Parallelism) -> Result<u8> {
    let docs = load_docs(&a.docs, cfg)?;
    let out = required(a.out, &cfg.paths.sigs, "out")?;
    let parsed = parse_stage(&docs, mode);
    write_json(&out, &parsed)?;
    tracing::info!(docs = docs.len(), out = %out.display(), "parsed");
    print_line(&serde_json::to_value(&parsed.summary)?);
    Ok(0)
}

/// Accepts both `docfuzz parse` output and a bare array of parsed docs.
fn read_parsed(path: &Path) -> Result<Vec<ParsedDoc>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Wrapped(ParseOutput),
        Bare(Vec<ParsedDoc>),
    }
    Ok(match read_json::<Either>(path)? {
        Either::Wrapped(w) => w.docs,
        Either::Bare(b) => b,
    })
}

fn backend(llm: &LlmArgs) -> Result<EnrichmentBackend> {
    match (llm.backend, &llm.llm_endpoint) {
        (Backend::Corpus, None) => Ok(EnrichmentBackend::CorpusInference),
        (Backend::Corpus, Some(_)) => bail!("--llm-endpoint needs --backend llm"),
        (Backend::Llm, None) => bail!("--backend llm needs --llm-endpoint"),
        (Backend::Llm, Some(ep)) => Ok(EnrichmentBackend::ExternalLlm(LlmBackend::http(
            ep.as_str(),
            llm.llm_model.as_str(),
            Duration::from_millis(llm.llm_timeout_ms),
        )?)),
    }
}

fn enrich_stage(
    parsed: &[ParsedDoc],
    corpus: Option<&Path>,
    llm: &LlmArgs,
    mode: Parallelism,
) -> Result<Vec<StandardizedApiInfo>> {
    let extra: Vec<StandardizedApiInfo> = match corpus {
        Some(p) => read_json(p)?,
        None => Vec::new(),
    };
    let (infos, summary) = standardize_all(parsed, &extra, &backend(llm)?, mode);
    for api in &summary.unparseable {
        tracing::warn!(api = %api, "signature could not be parsed; skipped");
    }
    print_line(&serde_json::to_value(&summary)?);
    Ok(infos)
}

fn cmd_enrich(a: EnrichArgs, cfg: &PipelineConfig, mode: Parallelism) -> Result<u8> {
    let input = required(a.input, &cfg.paths.sigs, "sigs")?;
    let out = required(a.out, &cfg.paths.std, "out")?;
    let corpus = a.corpus.or_else(|| cfg.paths.corpus.clone());
    let parsed = read_parsed(&input)?;
    let infos = enrich_stage(&parsed, corpus.as_deref(), &a.llm, mode)?;
    write_json(&out, &infos)?;
    Ok(0)
}

fn extract_stage(infos: &[StandardizedApiInfo], out: &Path, mode: Parallelism) -> Result<Vec<ApiConstraintSet>> {
    let sets = extract_all(infos, mode)?;
    write_json(out, &sets)?;
    print_line(&serde_json::to_value(extract_metrics(&sets))?);
    Ok(sets)
}

fn cmd_extract(a: ExtractArgs, cfg: &PipelineConfig, mode: Parallelism) -> Result<u8> {
    let input = required(a.std, &cfg.paths.std, "std")?;
    let out = required(a.out, &cfg.paths.constraints, "out")?;
    let infos: Vec<StandardizedApiInfo> = read_json(&input)?;
    extract_stage(&infos, &out, mode)?;
    Ok(0)
}

/// Merges config-file values and flags (flags win) into a campaign config.
fn campaign_config(a: &CampaignArgs, cfg: &PipelineConfig) -> Result<CampaignConfig> {
    let mut c = CampaignConfig {
        gen: cfg.gen.clone(),
        ..CampaignConfig::default()
    };
    let sec = &cfg.campaign;
    if let Some(t) = a.target.clone().or_else(|| sec.target.clone()) {
        c.target = t;
    }
    if let Some(b) = a.budget {
        c.gen.budget_per_api = b;
    }
    if let Some(s) = a.seed {
        c.gen.rng_seed = s;
    }
    if let Some(r) = a.adversarial_ratio {
        c.gen.adversarial_ratio = r;
    }
    for name in &a.disable {
        c.gen.strategy_flags.disable(name.trim())?;
    }
    if let Some(t) = a.timeout_ms.or(sec.timeout_ms) {
        c.timeout_ms = t;
    }
    if let Some(p) = a.parallel_workers.or(sec.parallel_workers) {
        c.parallel_workers = p;
    }
    if let Some(list) = &sec.allowlist {
        c.allowlist = list.clone();
    }
    c.allowlist.extend(a.allow.iter().cloned());
    if let Some(r) = sec.rss_limit_bytes {
        c.rss_limit_bytes = r;
    }
    c.validate()?;
    Ok(c)
}

fn worker_program(a: &CampaignArgs, cfg: &PipelineConfig) -> String {
    a.worker
        .clone()
        .or_else(|| cfg.campaign.worker.clone())
        .unwrap_or_else(|| DEFAULT_WORKER.to_string())
}

type Factory = Box<dyn Fn() -> Result<Box<dyn Executor>, OrchestratorError> + Sync>;

/// Picks the executor for a run; the returned sink collects a transcript
/// when recording.
fn executor_factory(
    a: &CampaignArgs,
    cfg: &PipelineConfig,
    campaign: &CampaignConfig,
) -> Result<(Factory, Option<Arc<Mutex<Transcript>>>)> {
    let base: Factory = if let Some(path) = &a.replay {
        let t = Transcript::load(path)?;
        Box::new(move || Ok(Box::new(ReplayExecutor::new(&t)) as Box<dyn Executor>))
    } else if a.in_process {
        if campaign.target != Target::Mock {
            bail!("--in-process only supports --target mock");
        }
        Box::new(|| Ok(Box::new(InProcessExecutor::new()) as Box<dyn Executor>))
    } else {
        let cmd = WorkerCommand::new(worker_program(a, cfg), &campaign.target);
        let (timeout, rss) = (campaign.timeout_ms, campaign.rss_limit_bytes);
        Box::new(move || Ok(Box::new(WorkerProcess::new(cmd.clone(), timeout, rss)) as Box<dyn Executor>))
    };
    if a.record.is_none() {
        return Ok((base, None));
    }
    let sink = Arc::new(Mutex::new(Transcript::default()));
    let lane_sink = sink.clone();
    let recording: Factory =
        Box::new(move || Ok(Box::new(RecordingExecutor::new(base()?, lane_sink.clone())) as Box<dyn Executor>));
    Ok((recording, Some(sink)))
}

fn dump_cases(dir: &Path, sets: &[ApiConstraintSet], campaign: &CampaignConfig) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for cs in sets {
        let path = dir.join(format!("{}.jsonl", file_stem(&cs.api_name)));
        let mut f =
            std::io::BufWriter::new(fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        for case in case_stream(cs, &campaign.gen) {
            writeln!(f, "{}", case.to_json())?;
        }
        f.flush()?;
    }
    Ok(())
}

fn fuzz_stage(
    mut sets: Vec<ApiConstraintSet>,
    out: &Path,
    a: &CampaignArgs,
    cfg: &PipelineConfig,
) -> Result<CampaignOutcome> {
    let campaign = campaign_config(a, cfg)?;
    if !a.api.is_empty() {
        for want in &a.api {
            if !sets.iter().any(|s| &s.api_name == want) {
                bail!("--api {want}: no such API in the constraint sets");
            }
        }
        sets.retain(|s| a.api.contains(&s.api_name));
    }
    if let Some(dir) = &a.dump_cases {
        dump_cases(dir, &sets, &campaign)?;
    }
    let (factory, sink) = executor_factory(a, cfg, &campaign)?;
    tracing::info!(apis = sets.len(), budget = campaign.gen.budget_per_api, target = %campaign.target, "campaign start");
    let outcome = run_campaign(&sets, &campaign, &factory)?;
    write_report(out, &outcome, campaign.timeout_ms)?;
    if let (Some(path), Some(sink)) = (&a.record, sink) {
        sink.lock()
            .map_err(|_| anyhow!("transcript lock poisoned"))?
            .save(path)?;
    }
    let r = &outcome.report;
    tracing::info!(cases = r.cases_executed, bugs = r.bugs.len(), "campaign done");
    print_line(&json!({
        "cases_executed": r.cases_executed,
        "generation_success_rate": r.generation_success_rate,
        "bugs": r.bugs.len(),
        "report": out.display().to_string(),
    }));
    Ok(outcome)
}

fn cmd_fuzz(a: FuzzArgs, cfg: &PipelineConfig) -> Result<u8> {
    let constraints = required(a.constraints, &cfg.paths.constraints, "constraints")?;
    let out = required(a.out, &cfg.paths.report, "out")?;
    let sets: Vec<ApiConstraintSet> = read_json(&constraints)?;
    let outcome = fuzz_stage(sets, &out, &a.campaign, cfg)?;
    Ok(u8::from(!outcome.report.bugs.is_empty()))
}

fn cmd_report(a: ReportArgs, cfg: &PipelineConfig) -> Result<u8> {
    let input = required(a.input, &cfg.paths.report, "in")?;
    let report = load_report(&input)?;
    print!("{}", render_table(&report));
    let budgets = if a.budgets.is_empty() {
        default_sweep_budgets(report.budget_per_api)
    } else {
        a.budgets
    };
    let dir = if input.is_dir() {
        input.clone()
    } else {
        input.parent().map(Path::to_path_buf).unwrap_or_default()
    };
    let csv_path = a.sweep_csv.unwrap_or_else(|| dir.join("budget_sweep.csv"));
    fs::write(&csv_path, sweep_csv(&budget_sweep(&report, &budgets)))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    println!("budget sweep: {}", csv_path.display());
    Ok(0)
}

fn cmd_repro(a: ReproArgs, cfg: &PipelineConfig) -> Result<u8> {
    let bug: BugReport = read_json(&a.bug)?;
    let campaign = campaign_config(&a.campaign, cfg)?;
    if a.campaign.record.is_some() || a.campaign.replay.is_some() {
        bail!("repro runs the case live; --record and --replay do not apply");
    }
    let (factory, _) = executor_factory(&a.campaign, cfg, &campaign)?;
    let mut exec = factory()?;
    let case = &bug.first_case;
    let res = ExecutionResult {
        case_index: case.case_index,
        outcome: exec.execute(case)?,
    };
    let verdict = classify_outcome(&res.outcome, case.validity_mode, &campaign.allowlist);
    let signature = dedup_signature(&res);
    let reproduced = verdict == bug.verdict && signature == bug.signature;
    print_line(&json!({
        "id": bug.id,
        "expected": {"verdict": bug.verdict, "signature": bug.signature},
        "observed": {"verdict": verdict, "signature": signature},
        "reproduced": reproduced,
    }));
    Ok(u8::from(!reproduced))
}

fn cmd_pipeline(a: PipelineArgs, cfg: &PipelineConfig, mode: Parallelism) -> Result<u8> {
    let docs = load_docs(&a.docs, cfg)?;
    let wd = &a.workdir;
    fs::create_dir_all(wd).with_context(|| format!("creating {}", wd.display()))?;

    let parsed = parse_stage(&docs, mode);
    write_json(&wd.join("sigs.json"), &parsed)?;
    print_line(&serde_json::to_value(&parsed.summary)?);

    let corpus = a.corpus.or_else(|| cfg.paths.corpus.clone());
    let infos = enrich_stage(&parsed.docs, corpus.as_deref(), &a.llm, mode)?;
    write_json(&wd.join("std_all.json"), &infos)?;

    let sets = extract_stage(&infos, &wd.join("constraints.json"), mode)?;
    let report_dir = wd.join("report");
    let outcome = fuzz_stage(sets, &report_dir, &a.campaign, cfg)?;

    let budgets = default_sweep_budgets(outcome.report.budget_per_api);
    fs::write(
        report_dir.join("budget_sweep.csv"),
        sweep_csv(&budget_sweep(&outcome.report, &budgets)),
    )?;
    print!("{}", render_table(&outcome.report));
    Ok(u8::from(!outcome.report.bugs.is_empty()))
}
