//! Resolved generation domains, dependency order and the validity checker.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::enrichment::rules::normalize_param_name;
use crate::generation::TestCase;
use crate::schema::{DependencyEdge, DependencyKind, DimSpec, SizeSpec, StandardizedApiInfo, TypeDomain, ValueRange};
use crate::value::{EncodedValue, ScalarType};

/// Largest extent a `Var` dimension may take in a valid case.
pub const VAR_DIM_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeTemplate {
    Scalar,
    Shaped(SizeSpec),
}

impl SizeTemplate {
    pub fn spec(&self) -> Option<&SizeSpec> {
        match self {
            SizeTemplate::Scalar => None,
            SizeTemplate::Shaped(s) => Some(s),
        }
    }

    /// Rank-1 templates made only of fixed dims are generated as sequences
    /// (points, colours, kernel sizes) rather than arrays.
    pub fn is_sequence(&self) -> bool {
        matches!(self, SizeTemplate::Shaped(s) if matches!(s.dims.as_slice(), [DimSpec::Fixed(_)]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedSpec {
    pub modifiable: bool,
    pub fixed_choices: Option<Vec<EncodedValue>>,
    pub type_domain: TypeDomain,
    pub size_template: SizeTemplate,
    pub value_range: Option<ValueRange>,
    pub deps: Vec<DependencyEdge>,
}

impl ResolvedSpec {
    pub fn dep(&self, pred: impl Fn(&DependencyKind) -> bool) -> Option<&DependencyEdge> {
        self.deps.iter().find(|d| pred(&d.kind))
    }

    /// Number of atomic constraints this spec contributes.
    pub fn constraint_count(&self) -> usize {
        1 + self.size_template.spec().map_or(0, SizeSpec::rank)
            + usize::from(self.value_range.is_some())
            + self.deps.len()
            + usize::from(self.fixed_choices.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApiConstraintSet {
    pub api_name: String,
    /// Specs in declaration order.
    pub specs: IndexMap<String, ResolvedSpec>,
    /// Generation order: every dependency source precedes its dependents.
    pub order: Vec<String>,
    pub constraint_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("cyclic dependency: {}", cycle.join(" -> "))]
    CyclicDependency { cycle: Vec<String> },
    #[error("parameter `{param}` refers to unknown parameter `{target}`")]
    UnknownReference { param: String, target: String },
    #[error("duplicate parameter `{0}`")]
    DuplicateParam(String),
}

fn type_of_choice(v: &EncodedValue) -> Option<ScalarType> {
    match v {
        EncodedValue::Int(_) => Some(ScalarType::Int32),
        EncodedValue::Float(_) => Some(ScalarType::Float32),
        EncodedValue::Bool(_) => Some(ScalarType::Bool),
        EncodedValue::Str(_) => Some(ScalarType::String),
        EncodedValue::Enum { .. } => Some(ScalarType::Enum),
        EncodedValue::NdArray(a) => Some(a.dtype()),
        EncodedValue::Seq(items) => items.first().and_then(type_of_choice),
        EncodedValue::Null => None,
    }
}

/// Names whose description makes them arrays even without a size.
fn array_keyword(name: &str, text: &str) -> bool {
    let norm = normalize_param_name(name);
    if matches!(norm.as_str(), "image" | "img" | "src" | "array") {
        return true;
    }
    let lower = text.to_lowercase();
    ["image", "array", "matrix"].iter().any(|k| lower.contains(k))
}

/// Edges `source -> dependent` implied by dependencies and size references.
fn edges(info: &StandardizedApiInfo) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for p in &info.params {
        for d in &p.description.depends_on {
            out.push((d.source.clone(), p.name.clone()));
        }
        if let Some(size) = &p.size_spec {
            for dim in &size.dims {
                if let DimSpec::Ref { param, .. } = dim {
                    out.push((param.clone(), p.name.clone()));
                }
            }
        }
    }
    out
}

/// Stable topological sort: among ready parameters the earliest declared goes first.
fn topo_order(info: &StandardizedApiInfo) -> Result<Vec<String>, ConstraintError> {
    let index: HashMap<&str, usize> = info
        .params
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.as_str(), i))
        .collect();
    let n = info.params.len();
    let mut indeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (src, dst) in edges(info) {
        let s = *index
            .get(src.as_str())
            .ok_or_else(|| ConstraintError::UnknownReference {
                param: dst.clone(),
                target: src.clone(),
            })?;
        let d = index[dst.as_str()];
        succ[s].push(d);
        preds[d].push(s);
        indeg[d] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|i| indeg[*i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() < n {
        // walk predecessors inside the unresolved set until a node repeats
        let remaining: BTreeSet<usize> = (0..n).filter(|i| indeg[*i] > 0).collect();
        let mut path = Vec::new();
        let mut at = *remaining.first().expect("some node is unresolved");
        loop {
            if let Some(pos) = path.iter().position(|p| *p == at) {
                let mut cycle: Vec<String> = path[pos..]
                    .iter()
                    .rev()
                    .map(|i: &usize| info.params[*i].name.clone())
                    .collect();
                cycle.push(cycle[0].clone());
                return Err(ConstraintError::CyclicDependency { cycle });
            }
            path.push(at);
            at = *preds[at]
                .iter()
                .find(|p| remaining.contains(p))
                .expect("unresolved nodes have unresolved preds");
        }
    }
    Ok(order.into_iter().map(|i| info.params[i].name.clone()).collect())
}

pub fn extract_constraints(info: &StandardizedApiInfo) -> Result<ApiConstraintSet, ConstraintError> {
    let mut seen = BTreeSet::new();
    for p in &info.params {
        if !seen.insert(p.name.as_str()) {
            return Err(ConstraintError::DuplicateParam(p.name.clone()));
        }
    }
    let order = topo_order(info)?;
    let mut resolved: HashMap<String, ResolvedSpec> = HashMap::new();
    for name in &order {
        let p = info.param(name).expect("order lists declared params");
        let fixed_choices = (!p.flag).then(|| {
            let mut choices = p.description.options.clone().unwrap_or_default();
            if let Some(d) = &p.default {
                if !choices.contains(d) {
                    choices.push(d.clone());
                }
            }
            choices
        });
        let type_domain = if !p.type_domain.is_empty() {
            p.type_domain.clone()
        } else if let Some(src) = p
            .description
            .depends_on
            .iter()
            .find(|d| d.kind == DependencyKind::SameType)
            .and_then(|d| resolved.get(&d.source))
        {
            src.type_domain.clone()
        } else if let Some(t) = fixed_choices.iter().flatten().find_map(type_of_choice) {
            TypeDomain::new([t])
        } else {
            TypeDomain::new([ScalarType::Float32])
        };
        let numeric = type_domain.iter().any(ScalarType::is_numeric);
        let size_template = match &p.size_spec {
            Some(s) => SizeTemplate::Shaped(s.clone()),
            None if p.flag && numeric && array_keyword(&p.name, &p.description.raw_text) => {
                SizeTemplate::Shaped(SizeSpec::rgb())
            }
            None => SizeTemplate::Scalar,
        };
        resolved.insert(
            name.clone(),
            ResolvedSpec {
                modifiable: p.flag,
                fixed_choices,
                type_domain,
                size_template,
                value_range: p.description.value_range,
                deps: p.description.depends_on.clone(),
            },
        );
    }
    let specs: IndexMap<String, ResolvedSpec> = info
        .params
        .iter()
        .map(|p| (p.name.clone(), resolved.remove(&p.name).expect("resolved every param")))
        .collect();
    let constraint_count = specs.values().map(ResolvedSpec::constraint_count).sum();
    Ok(ApiConstraintSet {
        api_name: info.api_name.clone(),
        specs,
        order,
        constraint_count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationRule {
    MissingArg,
    UnexpectedArg,
    FixedChoice,
    Type { expected: Vec<ScalarType>, found: String },
    Size { detail: String },
    ValueRange { lo: f64, hi: f64 },
    SameType(String),
    SameShape(String),
    BoundedByShape(String),
}

impl fmt::Display for ViolationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationRule::MissingArg => f.write_str("MissingArg"),
            ViolationRule::UnexpectedArg => f.write_str("UnexpectedArg"),
            ViolationRule::FixedChoice => f.write_str("FixedChoice"),
            ViolationRule::Type { expected, found } => {
                let names: Vec<_> = expected.iter().map(|t| t.as_str()).collect();
                write!(f, "Type(expected {}, found {found})", names.join("|"))
            }
            ViolationRule::Size { detail } => write!(f, "Size({detail})"),
            ViolationRule::ValueRange { lo, hi } => write!(f, "ValueRange([{lo}, {hi}))"),
            ViolationRule::SameType(s) => write!(f, "SameType({s})"),
            ViolationRule::SameShape(s) => write!(f, "SameShape({s})"),
            ViolationRule::BoundedByShape(s) => write!(f, "BoundedByShape({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub param: String,
    pub rule: ViolationRule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.param, self.rule)
    }
}

/// Whether scalar `v` (or every element of a sequence) is representable as `t`.
pub fn fits_type(v: &EncodedValue, t: ScalarType) -> bool {
    match (v, t) {
        (EncodedValue::Int(i), ScalarType::Uint8) => (0..=255).contains(i),
        (EncodedValue::Int(i), ScalarType::Int32) => i32::try_from(*i).is_ok(),
        (EncodedValue::Float(_), ScalarType::Float32 | ScalarType::Float64) => true,
        (EncodedValue::Bool(_), ScalarType::Bool) => true,
        (EncodedValue::Str(_), ScalarType::String) => true,
        (EncodedValue::Enum { .. }, ScalarType::Enum) => true,
        (EncodedValue::NdArray(a), t) => a.dtype() == t,
        (EncodedValue::Seq(items), t) => !items.is_empty() && items.iter().all(|i| fits_type(i, t)),
        _ => false,
    }
}

/// A coarse type tag used for same-type comparisons.
fn type_tag(v: &EncodedValue) -> String {
    match v {
        EncodedValue::NdArray(a) => a.dtype().as_str().to_string(),
        EncodedValue::Seq(items) => format!("seq<{}>", items.first().map_or("", |i| i.kind())),
        other => other.kind().to_string(),
    }
}

fn numeric_elements(v: &EncodedValue) -> Vec<f64> {
    match v {
        EncodedValue::NdArray(a) if a.dtype().is_numeric() => a.to_f64_vec(),
        EncodedValue::Seq(items) => items.iter().flat_map(numeric_elements).collect(),
        EncodedValue::Int(_) | EncodedValue::Float(_) => v.as_f64().into_iter().collect(),
        _ => Vec::new(),
    }
}

/// (x, y) coordinates of a point or point list.
pub(crate) fn coordinates(v: &EncodedValue) -> Vec<(f64, f64)> {
    let flat = numeric_elements(v);
    flat.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn check_size(spec: &SizeSpec, v: &EncodedValue, args: &IndexMap<String, EncodedValue>) -> Option<String> {
    let shape: Vec<usize> = match v {
        EncodedValue::NdArray(a) => a.shape().to_vec(),
        EncodedValue::Seq(items) if spec.rank() == 1 => vec![items.len()],
        other => return Some(format!("expected a sized value, found {}", other.kind())),
    };
    if shape.len() != spec.rank() {
        return Some(format!("rank {} instead of {}", shape.len(), spec.rank()));
    }
    for (axis, (dim, &n)) in spec.dims.iter().zip(&shape).enumerate() {
        let ok = match dim {
            DimSpec::Fixed(k) => n == *k,
            DimSpec::Var(_) => (1..=VAR_DIM_LIMIT).contains(&n),
            DimSpec::ChannelSet(set) => u8::try_from(n).is_ok_and(|c| set.contains(&c)),
            DimSpec::Ref { param, axis: ra } => args
                .get(param)
                .and_then(EncodedValue::as_array)
                .and_then(|a| a.shape().get(*ra))
                .is_some_and(|m| *m == n),
        };
        if !ok {
            return Some(format!("axis {axis} = {n} violates {dim:?}"));
        }
    }
    None
}

/// Every constraint `case` breaks; empty means the case is valid.
pub fn check_case(cs: &ApiConstraintSet, case: &TestCase) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |param: &str, rule| {
        out.push(Violation {
            param: param.to_string(),
            rule,
        })
    };
    for name in case.args.keys() {
        if !cs.specs.contains_key(name) {
            push(name, ViolationRule::UnexpectedArg);
        }
    }
    for (name, spec) in &cs.specs {
        let Some(v) = case.args.get(name) else {
            push(name, ViolationRule::MissingArg);
            continue;
        };
        if let Some(choices) = &spec.fixed_choices {
            if !choices.contains(v) {
                push(name, ViolationRule::FixedChoice);
            }
            continue;
        }
        if !spec.type_domain.iter().any(|t| fits_type(v, t)) {
            push(
                name,
                ViolationRule::Type {
                    expected: spec.type_domain.as_slice().to_vec(),
                    found: type_tag(v),
                },
            );
        }
        match &spec.size_template {
            SizeTemplate::Scalar => {
                if matches!(v, EncodedValue::NdArray(_) | EncodedValue::Seq(_)) {
                    push(
                        name,
                        ViolationRule::Size {
                            detail: format!("expected a scalar, found {}", v.kind()),
                        },
                    );
                }
            }
            SizeTemplate::Shaped(s) => {
                if let Some(detail) = check_size(s, v, &case.args) {
                    push(name, ViolationRule::Size { detail });
                }
            }
        }
        if let Some(r) = spec.value_range {
            if numeric_elements(v).iter().any(|x| !(x.is_finite() && r.contains(*x))) {
                push(name, ViolationRule::ValueRange { lo: r.lo, hi: r.hi });
            }
        }
        for dep in &spec.deps {
            let Some(src) = case.args.get(&dep.source) else {
                continue;
            };
            match &dep.kind {
                DependencyKind::SameType => {
                    if type_tag(src) != type_tag(v) {
                        push(name, ViolationRule::SameType(dep.source.clone()));
                    }
                }
                DependencyKind::SameShape => {
                    let ok = match (v.as_array(), src.as_array(), spec.size_template.spec()) {
                        (Some(a), Some(b), Some(s)) => {
                            a.shape().len() == b.shape().len()
                                && s.dims
                                    .iter()
                                    .enumerate()
                                    .all(|(i, d)| !matches!(d, DimSpec::Var(_)) || a.shape().get(i) == b.shape().get(i))
                        }
                        _ => false,
                    };
                    if !ok {
                        push(name, ViolationRule::SameShape(dep.source.clone()));
                    }
                }
                DependencyKind::BoundedByShape { axes } => {
                    let limits = src
                        .as_array()
                        .and_then(|a| Some((*a.shape().get(axes[0])?, *a.shape().get(axes[1])?)));
                    let ok = match limits {
                        Some((wx, hy)) => coordinates(v)
                            .iter()
                            .all(|&(x, y)| x >= 0.0 && y >= 0.0 && x < wx as f64 && y < hy as f64),
                        None => false,
                    };
                    if !ok {
                        push(name, ViolationRule::BoundedByShape(dep.source.clone()));
                    }
                }
            }
        }
    }
    out
}
