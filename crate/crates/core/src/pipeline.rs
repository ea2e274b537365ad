//! Whole-corpus stage helpers shared by the CLI, tests and benches.

use serde::{Deserialize, Serialize};

use crate::constraint_engine::{extract_constraints, ApiConstraintSet, ConstraintError};
use crate::doc_parser::{parse_doc, DocClass, ParsedDoc, RawApiDoc};
use crate::enrichment::{standardize_all, EnrichmentBackend};
use crate::par::{self, Parallelism};
use crate::schema::StandardizedApiInfo;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseSummary {
    pub well_documented: usize,
    pub poorly_documented: usize,
    pub undocumented: usize,
    /// Docs whose signature could not be parsed.
    pub malformed: usize,
}

pub fn parse_corpus(docs: &[RawApiDoc], mode: Parallelism) -> Vec<ParsedDoc> {
    par::map(mode, docs, parse_doc)
}

pub fn parse_summary(parsed: &[ParsedDoc]) -> ParseSummary {
    let mut s = ParseSummary::default();
    for d in parsed {
        match d.class {
            DocClass::WellDocumented => s.well_documented += 1,
            DocClass::PoorlyDocumented => s.poorly_documented += 1,
            DocClass::Undocumented => s.undocumented += 1,
        }
        if d.class != DocClass::Undocumented && d.signature.is_none() {
            s.malformed += 1;
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractMetrics {
    pub apis: usize,
    pub total_constraints: usize,
}

pub fn extract_all(infos: &[StandardizedApiInfo], mode: Parallelism) -> Result<Vec<ApiConstraintSet>, ConstraintError> {
    par::map(mode, infos, extract_constraints).into_iter().collect()
}

pub fn extract_metrics(sets: &[ApiConstraintSet]) -> ExtractMetrics {
    ExtractMetrics {
        apis: sets.len(),
        total_constraints: sets.iter().map(|s| s.constraint_count).sum(),
    }
}

/// Standardized infos for the bundled mock-target docstrings.
pub fn bundled_mock_infos(mode: Parallelism) -> Vec<StandardizedApiInfo> {
    let parsed = parse_corpus(&crate::bundled::mock_docs(), mode);
    standardize_all(&parsed, &[], &EnrichmentBackend::CorpusInference, mode).0
}

/// Constraint sets for the bundled mock-target docstrings.
pub fn bundled_mock_constraints(mode: Parallelism) -> Vec<ApiConstraintSet> {
    extract_all(&bundled_mock_infos(mode), mode).expect("bundled corpus has no dependency cycles")
}
