//! Parameter patterns learned from well-documented APIs.

use std::collections::{BTreeMap, HashMap};

use super::rules::normalize_param_name;
use crate::schema::{DependencyKind, DimSpec, DimSymbol, ParamInfo, Provenance, StandardizedApiInfo};

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub info: ParamInfo,
    pub source_api: String,
}

/// Multimap from normalized parameter name to every parameter seen under it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamCorpus {
    entries: BTreeMap<String, Vec<CorpusEntry>>,
    sources: Vec<StandardizedApiInfo>,
}

pub fn build_param_corpus(infos: &[StandardizedApiInfo]) -> ParamCorpus {
    let mut corpus = ParamCorpus::default();
    let mut sources: Vec<&StandardizedApiInfo> = infos
        .iter()
        .filter(|i| {
            let keep = i.provenance == Provenance::Parsed;
            if !keep {
                tracing::warn!(api = %i.api_name, "skipping enriched info when building the parameter corpus");
            }
            keep
        })
        .collect();
    sources.sort_by(|a, b| a.api_name.cmp(&b.api_name));
    for info in &sources {
        for p in &info.params {
            corpus
                .entries
                .entry(normalize_param_name(&p.name))
                .or_default()
                .push(CorpusEntry {
                    info: p.clone(),
                    source_api: info.api_name.clone(),
                });
        }
    }
    for list in corpus.entries.values_mut() {
        list.sort_by(|a, b| (&a.source_api, &a.info.name).cmp(&(&b.source_api, &b.info.name)));
    }
    corpus.sources = sources.into_iter().cloned().collect();
    corpus
}

/// The parts of a parameter that make up its reusable pattern: everything
/// except its name and free text.
fn pattern_key(p: &ParamInfo) -> String {
    let mut q = p.clone();
    q.name.clear();
    q.description.raw_text.clear();
    serde_json::to_string(&q).expect("IR values always serialize")
}

impl ParamCorpus {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct normalized names.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, normalized: &str) -> &[CorpusEntry] {
        self.entries.get(normalized).map_or(&[], Vec::as_slice)
    }

    /// Source infos, sorted by API name.
    pub fn sources(&self) -> &[StandardizedApiInfo] {
        &self.sources
    }

    /// Best pattern for a parameter called `name`: exact-name matches take
    /// priority over normalized matches; among candidates the most frequent
    /// pattern wins, ties going to the smallest source API.
    pub fn lookup(&self, name: &str) -> Option<&CorpusEntry> {
        let all = self.get(&normalize_param_name(name));
        let exact: Vec<&CorpusEntry> = all.iter().filter(|e| e.info.name == name).collect();
        let candidates: Vec<&CorpusEntry> = if exact.is_empty() { all.iter().collect() } else { exact };
        let mut groups: HashMap<String, (usize, &CorpusEntry)> = HashMap::new();
        for e in candidates {
            let slot = groups.entry(pattern_key(&e.info)).or_insert((0, e));
            slot.0 += 1;
            if e.source_api < slot.1.source_api {
                slot.1 = e;
            }
        }
        groups
            .into_values()
            .max_by(|(ca, ea), (cb, eb)| ca.cmp(cb).then_with(|| eb.source_api.cmp(&ea.source_api)))
            .map(|(_, e)| e)
    }

    /// Source infos sharing at least one normalized parameter name with `names`.
    pub fn exemplars_for(&self, names: &[String]) -> Vec<StandardizedApiInfo> {
        let wanted: Vec<String> = names.iter().map(|n| normalize_param_name(n)).collect();
        self.sources
            .iter()
            .filter(|s| s.params.iter().any(|p| wanted.contains(&normalize_param_name(&p.name))))
            .cloned()
            .collect()
    }
}

/// Adapts a borrowed parameter to its new API: renames it and drops any
/// dependency or size reference whose target is not among `earlier`.
pub fn remap(entry: &CorpusEntry, name: &str, earlier: &[ParamInfo]) -> ParamInfo {
    let mut p = entry.info.clone();
    p.name = name.to_string();
    let find = |n: &str| earlier.iter().find(|e| e.name == n);
    if let Some(size) = &mut p.size_spec {
        for dim in &mut size.dims {
            if let DimSpec::Ref { param, axis } = dim {
                let ok = find(param)
                    .and_then(|s| s.size_spec.as_ref())
                    .is_some_and(|s| *axis < s.rank());
                if !ok {
                    *dim = DimSpec::Var(DimSymbol::N);
                }
            }
        }
    }
    let mut deps = std::mem::take(&mut p.description.depends_on);
    deps.retain(|d| {
        let Some(src) = find(&d.source) else {
            return false;
        };
        match d.kind {
            DependencyKind::SameType => true,
            DependencyKind::SameShape => match (&src.size_spec, &p.size_spec) {
                (Some(a), Some(b)) => a.rank() == b.rank(),
                (Some(_), None) => true,
                (None, _) => false,
            },
            DependencyKind::BoundedByShape { axes } => src
                .size_spec
                .as_ref()
                .is_some_and(|s| axes.iter().all(|a| *a < s.rank())),
        }
    });
    for d in &deps {
        let src = find(&d.source).expect("retained above");
        match d.kind {
            DependencyKind::SameType if !src.type_domain.is_empty() => p.type_domain = src.type_domain.clone(),
            DependencyKind::SameShape if p.size_spec.is_none() => p.size_spec = src.size_spec.clone(),
            _ => {}
        }
    }
    p.description.depends_on = deps;
    p
}
