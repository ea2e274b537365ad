//! Building standardized API information from parsed docstrings.

pub mod corpus;
pub mod llm;
pub mod rules;

use serde::{Deserialize, Serialize};

pub use corpus::{build_param_corpus, CorpusEntry, ParamCorpus};
pub use llm::{render_llm_prompt, EnrichError, HttpLlmClient, LlmBackend, LlmClient};
pub use rules::{infer_param, normalize_param_name};

use crate::doc_parser::{DocClass, ParamDescription, ParsedDoc, SignatureInfo};
use crate::par::{self, Parallelism};
use crate::schema::{ParamInfo, Provenance, StandardizedApiInfo, TypeDomain};
use crate::value::ScalarType;

#[derive(Debug, Clone, Default)]
pub enum EnrichmentBackend {
    #[default]
    CorpusInference,
    ExternalLlm(LlmBackend),
}

/// Maps a well-documented API's signature and `@param` texts to the IR.
pub fn standardize_well_documented(sig: &SignatureInfo, descs: &[ParamDescription]) -> StandardizedApiInfo {
    let mut params: Vec<ParamInfo> = Vec::with_capacity(sig.inputs.len());
    for name in &sig.inputs {
        let text = descs.iter().find(|d| &d.name == name).map_or("", |d| d.text.as_str());
        let p = infer_param(name, text, &params);
        params.push(p);
    }
    StandardizedApiInfo {
        api_name: sig.api_name.clone(),
        params,
        output_count: sig.outputs.len(),
        provenance: Provenance::Parsed,
    }
}

/// The maximally permissive description used when nothing can be inferred.
pub fn fallback_param(name: &str) -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Float32]),
        ..ParamInfo::unconstrained(name, "")
    }
}

fn enrich_from_corpus(sig: &SignatureInfo, corpus: &ParamCorpus) -> StandardizedApiInfo {
    let mut params: Vec<ParamInfo> = Vec::with_capacity(sig.inputs.len());
    for name in &sig.inputs {
        let p = match corpus.lookup(name) {
            Some(entry) => {
                let candidate = corpus::remap(entry, name, &params);
                let mut trial = params.clone();
                trial.push(candidate.clone());
                let probe = StandardizedApiInfo {
                    api_name: sig.api_name.clone(),
                    params: trial,
                    output_count: 0,
                    provenance: Provenance::Enriched,
                };
                if crate::schema::validate(&probe).is_empty() {
                    candidate
                } else {
                    tracing::debug!(api = %sig.api_name, param = %name, "borrowed pattern does not validate here");
                    fallback_param(name)
                }
            }
            None => fallback_param(name),
        };
        params.push(p);
    }
    StandardizedApiInfo {
        api_name: sig.api_name.clone(),
        params,
        output_count: sig.outputs.len(),
        provenance: Provenance::Enriched,
    }
}

/// Infers the IR of a signature-only API. Never fails: backend problems are
/// logged and answered by corpus inference.
pub fn enrich_poorly_documented(
    sig: &SignatureInfo,
    corpus: &ParamCorpus,
    backend: &EnrichmentBackend,
) -> StandardizedApiInfo {
    if let EnrichmentBackend::ExternalLlm(llm) = backend {
        let exemplars = corpus.exemplars_for(&sig.inputs);
        match llm.request(sig, &exemplars) {
            Ok(info) => return info,
            Err(e) => tracing::warn!(api = %sig.api_name, error = %e, "language-model enrichment failed; using corpus"),
        }
    }
    enrich_from_corpus(sig, corpus)
}

/// Result of standardizing a whole parsed corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizeSummary {
    pub well_documented: usize,
    pub poorly_documented: usize,
    pub undocumented: usize,
    pub unparseable: Vec<String>,
}

/// Standardizes every parseable doc: well-documented ones directly, then
/// signature-only ones from a corpus built over the well-documented infos
/// plus `extra_corpus`. Undocumented APIs are skipped.
pub fn standardize_all(
    parsed: &[ParsedDoc],
    extra_corpus: &[StandardizedApiInfo],
    backend: &EnrichmentBackend,
    mode: Parallelism,
) -> (Vec<StandardizedApiInfo>, StandardizeSummary) {
    let mut summary = StandardizeSummary {
        well_documented: 0,
        poorly_documented: 0,
        undocumented: 0,
        unparseable: Vec::new(),
    };
    let mut well = Vec::new();
    let mut poor = Vec::new();
    for doc in parsed {
        match (doc.class, &doc.signature) {
            (DocClass::Undocumented, _) => summary.undocumented += 1,
            (_, None) => summary.unparseable.push(doc.api_path.clone()),
            (DocClass::WellDocumented, Some(sig)) => {
                summary.well_documented += 1;
                well.push((sig, doc.params.as_slice()));
            }
            (DocClass::PoorlyDocumented, Some(sig)) => {
                summary.poorly_documented += 1;
                poor.push(sig);
            }
        }
    }
    let mut infos = par::map(mode, &well, |(sig, descs)| standardize_well_documented(sig, descs));
    let mut corpus_src = infos.clone();
    corpus_src.extend(extra_corpus.iter().cloned());
    let corpus = build_param_corpus(&corpus_src);
    infos.extend(par::map(mode, &poor, |sig| {
        enrich_poorly_documented(sig, &corpus, backend)
    }));
    (infos, summary)
}
