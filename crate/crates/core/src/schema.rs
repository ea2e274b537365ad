//! The standardized API-information IR.
//!
//! One [`StandardizedApiInfo`] per API: its name, ordered input parameters
//! and output count. Each parameter carries a modifiable flag, an optional
//! default, a type domain, an optional size template and a description whose
//! machine-readable parts (value range, legal options, dependencies) sit
//! next to the raw text.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::doc_parser::ParamDescription;
use crate::value::{EncodedValue, ScalarType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DimSymbol {
    H,
    W,
    N,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DimSpec {
    Fixed(usize),
    Var(DimSymbol),
    Ref { param: String, axis: usize },
    ChannelSet(BTreeSet<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub dims: Vec<DimSpec>,
}

impl SizeSpec {
    pub fn new(dims: Vec<DimSpec>) -> Self {
        SizeSpec { dims }
    }

    /// Height x width x channels with `channels` allowed channel counts.
    pub fn image(channels: impl IntoIterator<Item = u8>) -> Self {
        SizeSpec::new(vec![
            DimSpec::Var(DimSymbol::H),
            DimSpec::Var(DimSymbol::W),
            DimSpec::ChannelSet(channels.into_iter().collect()),
        ])
    }

    /// The three-channel image template used when nothing more specific is known.
    pub fn rgb() -> Self {
        SizeSpec::image([3])
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn has_var_dim(&self) -> bool {
        self.dims.iter().any(|d| matches!(d, DimSpec::Var(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DependencyKind {
    SameType,
    SameShape,
    /// The owner's coordinates (x, y) must lie below the source's extents
    /// along `axes` = (axis for x, axis for y).
    BoundedByShape {
        axes: [usize; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependencyEdge {
    pub source: String,
    pub kind: DependencyKind,
}

impl DependencyEdge {
    pub fn new(source: impl Into<String>, kind: DependencyKind) -> Self {
        DependencyEdge {
            source: source.into(),
            kind,
        }
    }
}

impl fmt::Display for DependencyEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DependencyKind::SameType => write!(f, "SameType({})", self.source),
            DependencyKind::SameShape => write!(f, "SameShape({})", self.source),
            DependencyKind::BoundedByShape { axes } => {
                write!(f, "BoundedByShape({}, axes={},{})", self.source, axes[0], axes[1])
            }
        }
    }
}

/// Half-open numeric interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        ValueRange { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptionSpec {
    pub raw_text: String,
    #[serde(default)]
    pub value_range: Option<ValueRange>,
    #[serde(default)]
    pub options: Option<Vec<EncodedValue>>,
    #[serde(default)]
    pub depends_on: Vec<DependencyEdge>,
}

impl DescriptionSpec {
    pub fn text(raw: impl Into<String>) -> Self {
        DescriptionSpec {
            raw_text: raw.into(),
            ..DescriptionSpec::default()
        }
    }
}

/// Ordered set of scalar types; duplicates are rejected when decoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct TypeDomain(Vec<ScalarType>);

impl TypeDomain {
    pub fn new(types: impl IntoIterator<Item = ScalarType>) -> Self {
        let mut out = Vec::new();
        for t in types {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        TypeDomain(out)
    }

    /// Builds a domain without deduplicating; used to exercise validation.
    pub fn from_vec_unchecked(types: Vec<ScalarType>) -> Self {
        TypeDomain(types)
    }

    pub fn as_slice(&self) -> &[ScalarType] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, t: ScalarType) -> bool {
        self.0.contains(&t)
    }

    pub fn iter(&self) -> impl Iterator<Item = ScalarType> + '_ {
        self.0.iter().copied()
    }

    /// Same members, ignoring order.
    pub fn same_members(&self, other: &TypeDomain) -> bool {
        let a: BTreeSet<_> = self.iter().collect();
        let b: BTreeSet<_> = other.iter().collect();
        a == b
    }
}

impl<'de> Deserialize<'de> for TypeDomain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let types = Vec::<ScalarType>::deserialize(d)?;
        for (i, t) in types.iter().enumerate() {
            if types[..i].contains(t) {
                return Err(D::Error::custom(format!("duplicate type `{t}` in type_domain")));
            }
        }
        Ok(TypeDomain(types))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamInfo {
    pub name: String,
    /// Whether generation strategies may mutate this parameter.
    pub flag: bool,
    #[serde(default)]
    pub default: Option<EncodedValue>,
    #[serde(default)]
    pub type_domain: TypeDomain,
    #[serde(default)]
    pub size_spec: Option<SizeSpec>,
    #[serde(default)]
    pub description: DescriptionSpec,
}

impl ParamInfo {
    /// A modifiable parameter with no constraints beyond its description text.
    pub fn unconstrained(name: impl Into<String>, raw_text: impl Into<String>) -> Self {
        ParamInfo {
            name: name.into(),
            flag: true,
            default: None,
            type_domain: TypeDomain::default(),
            size_spec: None,
            description: DescriptionSpec::text(raw_text),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Parsed,
    Enriched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardizedApiInfo {
    pub api_name: String,
    pub params: Vec<ParamInfo>,
    pub output_count: usize,
    pub provenance: Provenance,
}

impl StandardizedApiInfo {
    pub fn param(&self, name: &str) -> Option<&ParamInfo> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("schema error at {pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer to the offending value, e.g. `/params/0/flag`.
    pub pointer: String,
    pub message: String,
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Field named in a serde "missing field" / "unknown field" message.
fn field_in_message(msg: &str) -> Option<&str> {
    let rest = msg
        .strip_prefix("missing field `")
        .or_else(|| msg.strip_prefix("unknown field `"))?;
    rest.split('`').next()
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let result: Result<T, _> = serde_path_to_error::deserialize(de);
    result.map_err(|e| {
        let mut pointer = json_pointer(e.path());
        let inner = e.into_inner();
        let message = inner.to_string();
        let bare = message.split(" at line ").next().unwrap_or(&message);
        if let Some(field) = field_in_message(bare) {
            if !pointer.ends_with(&format!("/{field}")) {
                pointer.push('/');
                pointer.push_str(field);
            }
        }
        SchemaError {
            pointer: if pointer.is_empty() { "/".into() } else { pointer },
            message: bare.to_string(),
        }
    })
}

pub fn to_json(info: &StandardizedApiInfo) -> String {
    serde_json::to_string_pretty(info).expect("IR values always serialize")
}

pub fn from_json(text: &str) -> Result<StandardizedApiInfo, SchemaError> {
    decode(text)
}

/// Serializes a corpus file: a JSON array of infos.
pub fn list_to_json(infos: &[StandardizedApiInfo]) -> String {
    serde_json::to_string_pretty(infos).expect("IR values always serialize")
}

pub fn list_from_json(text: &str) -> Result<Vec<StandardizedApiInfo>, SchemaError> {
    decode(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    EmptyApiName,
    InvalidIdentifier,
    DuplicateParam,
    DuplicateType,
    UnmodifiableWithoutDomain,
    EmptyOptions,
    EmptyValueRange,
    SelfDependency,
    UnknownDependency,
    ForwardDependency,
    SameTypeDomainMismatch,
    SameShapeRankMismatch,
    BoundedAxesInvalid,
    ZeroDimension,
    InvalidChannelSet,
    ForwardSizeRef,
    RefAxisOutOfRange,
    SizeOnNonNumeric,
    UnknownDescribedParam,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::EmptyApiName => "empty api name",
            Rule::InvalidIdentifier => "invalid identifier",
            Rule::DuplicateParam => "duplicate param",
            Rule::DuplicateType => "duplicate type",
            Rule::UnmodifiableWithoutDomain => "unmodifiable without domain",
            Rule::EmptyOptions => "empty options",
            Rule::EmptyValueRange => "empty value range",
            Rule::SelfDependency => "self dependency",
            Rule::UnknownDependency => "unknown dependency",
            Rule::ForwardDependency => "forward dependency",
            Rule::SameTypeDomainMismatch => "same-type domain mismatch",
            Rule::SameShapeRankMismatch => "same-shape rank mismatch",
            Rule::BoundedAxesInvalid => "bounded axes invalid",
            Rule::ZeroDimension => "zero dimension",
            Rule::InvalidChannelSet => "invalid channel set",
            Rule::ForwardSizeRef => "forward size reference",
            Rule::RefAxisOutOfRange => "size reference axis out of range",
            Rule::SizeOnNonNumeric => "size on non-numeric type",
            Rule::UnknownDescribedParam => "unknown described param",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub param: Option<String>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            Some(p) => write!(f, "{p}: {} ({})", self.rule.id(), self.detail),
            None => write!(f, "{} ({})", self.rule.id(), self.detail),
        }
    }
}

pub type ValidationReport = Vec<SchemaViolation>;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reports every invariant breach in `info`; an empty report means valid.
pub fn validate(info: &StandardizedApiInfo) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |param: Option<&str>, rule: Rule, detail: String| {
        out.push(SchemaViolation {
            param: param.map(str::to_string),
            rule,
            detail,
        })
    };

    if info.api_name.trim().is_empty() {
        push(None, Rule::EmptyApiName, "api_name is empty".into());
    }

    let mut seen = HashSet::new();
    for (i, p) in info.params.iter().enumerate() {
        if !seen.insert(p.name.as_str()) {
            push(
                Some(&p.name),
                Rule::DuplicateParam,
                format!("declared again at index {i}"),
            );
        }
    }
    let pos_of = |name: &str| info.position(name);

    for (i, p) in info.params.iter().enumerate() {
        let name = Some(p.name.as_str());
        if !is_identifier(&p.name) {
            push(name, Rule::InvalidIdentifier, format!("`{}`", p.name));
        }
        let types = p.type_domain.as_slice();
        for (j, t) in types.iter().enumerate() {
            if types[..j].contains(t) {
                push(name, Rule::DuplicateType, format!("`{t}` listed twice"));
            }
        }

        let desc = &p.description;
        let has_options = desc.options.as_ref().is_some_and(|o| !o.is_empty());
        if !p.flag && !has_options && p.default.is_none() {
            push(
                name,
                Rule::UnmodifiableWithoutDomain,
                "flag is false but no options or default".into(),
            );
        }
        if desc.options.as_ref().is_some_and(|o| o.is_empty()) {
            push(name, Rule::EmptyOptions, "options present but empty".into());
        }
        if let Some(r) = desc.value_range {
            if !(r.lo.is_finite() && r.hi.is_finite() && r.lo < r.hi) {
                push(name, Rule::EmptyValueRange, format!("[{}, {})", r.lo, r.hi));
            }
        }

        if let Some(size) = &p.size_spec {
            if !types.is_empty() && types.iter().all(|t| !t.is_numeric()) {
                push(
                    name,
                    Rule::SizeOnNonNumeric,
                    format!("type domain {types:?} cannot hold arrays"),
                );
            }
            for (axis, dim) in size.dims.iter().enumerate() {
                match dim {
                    DimSpec::Fixed(0) => push(name, Rule::ZeroDimension, format!("axis {axis} is Fixed(0)")),
                    DimSpec::ChannelSet(set) if set.is_empty() || set.iter().any(|c| !(1..=4).contains(c)) => {
                        push(name, Rule::InvalidChannelSet, format!("axis {axis}: {set:?}"))
                    }
                    DimSpec::Ref { param, axis: ref_axis } => match pos_of(param) {
                        Some(j) if j < i => {
                            let src = &info.params[j];
                            match &src.size_spec {
                                Some(s) if *ref_axis < s.rank() => {}
                                _ => push(
                                    name,
                                    Rule::RefAxisOutOfRange,
                                    format!("axis {axis} refers to {param}[{ref_axis}]"),
                                ),
                            }
                        }
                        _ => push(name, Rule::ForwardSizeRef, format!("axis {axis} refers to `{param}`")),
                    },
                    _ => {}
                }
            }
        }

        for dep in &desc.depends_on {
            if dep.source == p.name {
                push(name, Rule::SelfDependency, dep.to_string());
                continue;
            }
            let Some(j) = pos_of(&dep.source) else {
                push(name, Rule::UnknownDependency, dep.to_string());
                continue;
            };
            if j > i {
                push(name, Rule::ForwardDependency, dep.to_string());
                continue;
            }
            let src = &info.params[j];
            match &dep.kind {
                DependencyKind::SameType => {
                    if !p.type_domain.is_empty()
                        && !src.type_domain.is_empty()
                        && !p.type_domain.same_members(&src.type_domain)
                    {
                        push(name, Rule::SameTypeDomainMismatch, dep.to_string());
                    }
                }
                DependencyKind::SameShape => match (&p.size_spec, &src.size_spec) {
                    (Some(a), Some(b)) if a.rank() != b.rank() => push(
                        name,
                        Rule::SameShapeRankMismatch,
                        format!("{} has rank {}, source rank {}", dep, a.rank(), b.rank()),
                    ),
                    (_, None) => push(name, Rule::SameShapeRankMismatch, format!("{dep}: source has no size")),
                    _ => {}
                },
                DependencyKind::BoundedByShape { axes } => match &src.size_spec {
                    Some(s) if axes.iter().all(|a| *a < s.rank()) => {}
                    _ => push(name, Rule::BoundedAxesInvalid, dep.to_string()),
                },
            }
        }
    }
    out
}

/// Flags `@param` descriptions whose name is not a parameter of `info`.
pub fn check_described_params(info: &StandardizedApiInfo, descs: &[ParamDescription]) -> ValidationReport {
    descs
        .iter()
        .filter(|d| info.param(&d.name).is_none())
        .map(|d| SchemaViolation {
            param: Some(d.name.clone()),
            rule: Rule::UnknownDescribedParam,
            detail: format!("`@param {}` names no input of {}", d.name, info.api_name),
        })
        .collect()
}
