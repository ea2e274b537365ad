use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use docfuzz_core::generation::GenConfig;
use docfuzz_core::orchestrator::Target;
use serde::Deserialize;

/// Stage artifact locations; each may also be given on the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub docs: Option<PathBuf>,
    pub sigs: Option<PathBuf>,
    pub std: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub constraints: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignSection {
    pub target: Option<Target>,
    pub worker: Option<String>,
    pub timeout_ms: Option<u64>,
    pub parallel_workers: Option<usize>,
    pub allowlist: Option<Vec<String>>,
    pub rss_limit_bytes: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub gen: GenConfig,
    pub campaign: CampaignSection,
    pub log_level: Option<String>,
}

impl PipelineConfig {
    /// Reads a `.toml` or `.json` config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: PipelineConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            Some("json") => serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
            _ => bail!("config file {} must end in .toml or .json", path.display()),
        };
        cfg.gen.validate()?;
        Ok(cfg)
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}
