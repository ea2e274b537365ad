//! Deterministic test-case generation under a constraint set.
//!
//! A case stream starts with [`init_case`] and continues with [`next_case`],
//! each case derived from its predecessor. Every random decision draws from
//! a stream keyed by `(seed, api, case_index, param)` (see [`rng`]), so a
//! stream is a pure function of the constraint set and the configuration.

pub mod rng;
pub mod strategies;
pub mod stream;

use std::collections::HashMap;

use indexmap::IndexMap;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use strategies::{apply_value_strategy, ValueStrategy};
pub use stream::{case_stream, validity_sweep, CaseStream};

use crate::constraint_engine::{fits_type, ApiConstraintSet, ResolvedSpec, SizeTemplate, VAR_DIM_LIMIT};
use crate::schema::{DependencyKind, DimSpec};
use crate::value::{round_half_away, EncodedValue, NdArray, ScalarType};

/// Per-strategy switches; turning one off removes it from every case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyFlags {
    #[serde(rename = "type")]
    pub type_: bool,
    pub size: bool,
    pub value_noise: bool,
    pub value_mask: bool,
    pub value_division: bool,
}

impl Default for StrategyFlags {
    fn default() -> Self {
        StrategyFlags {
            type_: true,
            size: true,
            value_noise: true,
            value_mask: true,
            value_division: true,
        }
    }
}

impl StrategyFlags {
    pub const NAMES: [&'static str; 5] = ["type", "size", "value_noise", "value_mask", "value_division"];

    pub fn none() -> Self {
        StrategyFlags {
            type_: false,
            size: false,
            value_noise: false,
            value_mask: false,
            value_division: false,
        }
    }

    pub fn disable(&mut self, name: &str) -> Result<(), GenConfigError> {
        let slot = match name {
            "type" => &mut self.type_,
            "size" => &mut self.size,
            "value_noise" => &mut self.value_noise,
            "value_mask" => &mut self.value_mask,
            "value_division" => &mut self.value_division,
            other => return Err(GenConfigError::UnknownStrategy(other.to_string())),
        };
        *slot = false;
        Ok(())
    }

    pub fn without(mut self, name: &str) -> Result<Self, GenConfigError> {
        self.disable(name)?;
        Ok(self)
    }

    pub fn value_strategies(&self) -> Vec<ValueStrategy> {
        let mut out = Vec::new();
        if self.value_noise {
            out.push(ValueStrategy::Noise);
        }
        if self.value_mask {
            out.push(ValueStrategy::Mask);
        }
        if self.value_division {
            out.push(ValueStrategy::Division);
        }
        out
    }

    pub fn any(&self) -> bool {
        self.type_ || self.size || !self.value_strategies().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenConfigError {
    #[error("invalid generation config: {0}")]
    Invalid(String),
    #[error("unknown strategy `{0}` (expected one of type, size, value_noise, value_mask, value_division)")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub budget_per_api: usize,
    pub rng_seed: u64,
    /// Inclusive bounds for `Var` dimensions in valid cases.
    pub dim_range: (usize, usize),
    /// Extents substituted for one `Var` dimension in extreme-size cases.
    pub extreme_dims: Vec<usize>,
    pub adversarial_ratio: f64,
    /// Noise standard deviation for integer dtypes.
    pub noise_sigma: f64,
    /// Noise standard deviation for float dtypes, relative to the unit range.
    pub noise_sigma_relative: f64,
    /// Inclusive range of the fill value used by masking.
    pub mask_value_range: (i64, i64),
    pub divisors: Vec<i64>,
    pub strategy_flags: StrategyFlags,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            budget_per_api: 600,
            rng_seed: 0,
            dim_range: (1, 64),
            extreme_dims: vec![0, 1, 4096],
            adversarial_ratio: 0.2,
            noise_sigma: 8.0,
            noise_sigma_relative: 0.05,
            mask_value_range: (0, 255),
            divisors: vec![2, 3, 4, 5, 8, 16],
            strategy_flags: StrategyFlags::default(),
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenConfigError> {
        let bad = |m: String| Err(GenConfigError::Invalid(m));
        if self.budget_per_api < 1 {
            return bad("budget_per_api must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.adversarial_ratio) {
            return bad(format!(
                "adversarial_ratio {} is outside [0, 1]",
                self.adversarial_ratio
            ));
        }
        let (lo, hi) = self.dim_range;
        if lo < 1 || lo > hi || hi > VAR_DIM_LIMIT {
            return bad(format!(
                "dim_range ({lo}, {hi}) must satisfy 1 <= lo <= hi <= {VAR_DIM_LIMIT}"
            ));
        }
        if self.extreme_dims.is_empty() {
            return bad("extreme_dims is empty".into());
        }
        for (name, s) in [
            ("noise_sigma", self.noise_sigma),
            ("noise_sigma_relative", self.noise_sigma_relative),
        ] {
            if !(s.is_finite() && s >= 0.0) {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        if self.mask_value_range.0 > self.mask_value_range.1 {
            return bad("mask_value_range is empty".into());
        }
        if self.divisors.is_empty() || self.divisors.iter().any(|d| *d < 1) {
            return bad("divisors must be non-empty and positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityMode {
    ValidOnly,
    Adversarial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeStrategy {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeStrategy {
    Resample,
    Extreme,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppliedStrategies {
    pub type_strategy: Option<TypeStrategy>,
    pub size_strategy: Option<SizeStrategy>,
    pub value_strategy: Option<ValueStrategy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestCase {
    pub api_name: String,
    pub case_index: u64,
    pub seed: u64,
    /// Arguments in declaration order.
    pub args: IndexMap<String, EncodedValue>,
    pub applied: AppliedStrategies,
    pub validity_mode: ValidityMode,
}

impl TestCase {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("test cases always serialize")
    }
}

/// Element range used when a parameter states none.
pub fn natural_range(t: ScalarType) -> (f64, f64) {
    match t {
        ScalarType::Uint8 | ScalarType::Int32 => (0.0, 256.0),
        ScalarType::Bool => (0.0, 2.0),
        _ => (0.0, 1.0),
    }
}

fn largest_f32_below(hi: f64) -> f32 {
    let mut h = hi as f32;
    while f64::from(h) >= hi {
        h = h.next_down();
    }
    h
}

fn smallest_f32_from(lo: f64) -> f32 {
    let mut l = lo as f32;
    while f64::from(l) < lo {
        l = l.next_up();
    }
    l
}

/// `[lo, hi)` for one dtype, with the dtype-specific limits worked out once.
#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    hi: f64,
    kind: IntervalKind,
}

#[derive(Debug, Clone, Copy)]
enum IntervalKind {
    /// Inclusive limits for drawing and for fitting; `None` when empty.
    Int(Option<((i64, i64), (f64, f64))>, f64),
    Bool,
    /// An empty float interval collapses to its lower end.
    Point,
    F32(f32, f32),
    F64(f64),
    Other,
}

impl Interval {
    fn new(t: ScalarType, lo: f64, hi: f64) -> Self {
        let kind = match t {
            ScalarType::Uint8 | ScalarType::Int32 => {
                let (dlo, dhi) = t.integer_limits().expect("integer dtype");
                let draw = ((lo.ceil() as i64).max(dlo), ((hi.ceil() - 1.0) as i64).min(dhi));
                let fit = (lo.ceil().max(dlo as f64), (hi.ceil() - 1.0).min(dhi as f64));
                IntervalKind::Int((draw.0 <= draw.1).then_some((draw, fit)), fit.0)
            }
            ScalarType::Bool => IntervalKind::Bool,
            ScalarType::Float32 | ScalarType::Float64 if lo >= hi => IntervalKind::Point,
            ScalarType::Float32 => {
                let l = smallest_f32_from(lo);
                IntervalKind::F32(l, largest_f32_below(hi).max(l))
            }
            ScalarType::Float64 => IntervalKind::F64(hi.next_down()),
            _ => IntervalKind::Other,
        };
        Interval { lo, hi, kind }
    }

    /// Moves `v` into the interval as representable in the dtype.
    #[inline]
    fn fit(&self, v: f64) -> f64 {
        let v = if v.is_nan() { self.lo } else { v };
        match self.kind {
            IntervalKind::Int(Some((_, (ilo, ihi))), _) => round_half_away(v).clamp(ilo, ihi),
            IntervalKind::Int(None, ilo) => ilo,
            IntervalKind::Bool => f64::from(v != 0.0),
            IntervalKind::Point => self.lo,
            IntervalKind::F32(l, h) => f64::from((v as f32).clamp(l, h)),
            IntervalKind::F64(h) => v.clamp(self.lo, h),
            IntervalKind::Other => v,
        }
    }

    #[inline]
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.kind {
            IntervalKind::Int(Some(((ilo, ihi), _)), _) => rng.random_range(ilo..=ihi) as f64,
            IntervalKind::Int(None, ilo) => ilo,
            IntervalKind::Bool => f64::from(u8::from(rng.random_bool(0.5))),
            IntervalKind::Point => self.lo,
            IntervalKind::F32(l, h) => f64::from((rng.random_range(self.lo..self.hi) as f32).clamp(l, h)),
            IntervalKind::F64(h) => rng.random_range(self.lo..self.hi).clamp(self.lo, h),
            IntervalKind::Other if self.lo >= self.hi => self.lo,
            IntervalKind::Other => rng.random_range(self.lo..self.hi),
        }
    }

    /// An array of independent draws, matching on the kind once.
    fn fill<R: Rng>(&self, t: ScalarType, shape: Vec<usize>, rng: &mut R) -> NdArray {
        let (lo, hi) = (self.lo, self.hi);
        match self.kind {
            IntervalKind::Int(Some(((a, b), _)), _) => NdArray::from_fn(t, shape, |_| rng.random_range(a..=b) as f64),
            IntervalKind::F32(l, h) => {
                NdArray::from_fn(t, shape, |_| f64::from((rng.random_range(lo..hi) as f32).clamp(l, h)))
            }
            IntervalKind::F64(h) => NdArray::from_fn(t, shape, |_| rng.random_range(lo..hi).clamp(lo, h)),
            _ => NdArray::from_fn(t, shape, |_| self.draw(rng)),
        }
        .expect("numeric dtype")
    }
}

/// Moves `v` into `[lo, hi)` as representable in dtype `t`.
pub fn fit(v: f64, t: ScalarType, lo: f64, hi: f64) -> f64 {
    Interval::new(t, lo, hi).fit(v)
}

fn random_string<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let n = rng.random_range(1..=8u64);
    (0..n)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len() as u64) as usize] as char)
        .collect()
}

fn scalar_value(t: ScalarType, x: f64) -> EncodedValue {
    match t {
        ScalarType::Uint8 | ScalarType::Int32 => EncodedValue::Int(x as i64),
        ScalarType::Float32 | ScalarType::Float64 => EncodedValue::Float(x),
        ScalarType::Bool => EncodedValue::Bool(x != 0.0),
        ScalarType::Enum => EncodedValue::Enum {
            name: format!("V{}", x as i64),
            value: x as i64,
        },
        ScalarType::String => EncodedValue::Str(String::new()),
    }
}

/// Per-element interval: the value range (or the dtype's natural range),
/// narrowed by the bounding shape for point coordinates. Coordinates
/// alternate x, y, so elements only ever see two distinct intervals.
struct ElementBounds {
    constrains: bool,
    /// Both intervals are the same.
    uniform: bool,
    even: Interval,
    odd: Interval,
}

impl ElementBounds {
    fn new(spec: &ResolvedSpec, t: ScalarType, args: &IndexMap<String, EncodedValue>) -> Self {
        let range = spec.value_range.map_or(natural_range(t), |r| (r.lo, r.hi));
        let coord_limits = spec
            .dep(|k| matches!(k, DependencyKind::BoundedByShape { .. }))
            .and_then(|d| {
                let DependencyKind::BoundedByShape { axes } = d.kind else {
                    unreachable!()
                };
                let shape = args.get(&d.source)?.as_array()?.shape();
                Some((*shape.get(axes[0])? as f64, *shape.get(axes[1])? as f64))
            });
        let interval = |limit: Option<f64>| {
            let (mut lo, mut hi) = range;
            if let Some(l) = limit {
                lo = lo.max(0.0);
                hi = hi.min(l);
            }
            Interval::new(t, lo, hi)
        };
        ElementBounds {
            constrains: spec.value_range.is_some() || coord_limits.is_some(),
            uniform: coord_limits.is_none_or(|(x, y)| x == y),
            even: interval(coord_limits.map(|c| c.0)),
            odd: interval(coord_limits.map(|c| c.1)),
        }
    }

    fn interval(&self, k: usize) -> &Interval {
        if k % 2 == 0 {
            &self.even
        } else {
            &self.odd
        }
    }

    fn clamp(&self, arr: NdArray) -> NdArray {
        if !self.constrains {
            return arr;
        }
        if self.uniform {
            arr.map_values(|_, v| self.even.fit(v))
        } else {
            arr.map_values(|k, v| self.interval(k).fit(v))
        }
    }
}

fn fresh_value<R: Rng>(
    spec: &ResolvedSpec,
    t: ScalarType,
    shape: Option<&[usize]>,
    args: &IndexMap<String, EncodedValue>,
    rng: &mut R,
) -> EncodedValue {
    let bounds = ElementBounds::new(spec, t, args);
    let element = |k: usize, rng: &mut R| bounds.interval(k).draw(rng);
    if t == ScalarType::String {
        return EncodedValue::Str(random_string(rng));
    }
    match shape {
        None => scalar_value(t, element(0, rng)),
        Some(shape) if spec.size_template.is_sequence() || t.element_size().is_none() => {
            let n = shape.iter().product::<usize>();
            EncodedValue::Seq((0..n).map(|k| scalar_value(t, element(k, rng))).collect())
        }
        Some(shape) => {
            if bounds.uniform {
                return EncodedValue::NdArray(bounds.even.fill(t, shape.to_vec(), rng));
            }
            let arr = NdArray::from_fn(t, shape.to_vec(), |k| element(k, rng)).expect("numeric dtype");
            EncodedValue::NdArray(arr)
        }
    }
}

fn pick<'a, R: Rng, T>(items: &'a [T], rng: &mut R) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.random_range(0..items.len() as u64) as usize])
    }
}

/// Types a parameter may take; arrays are restricted to numeric dtypes.
fn candidate_types(spec: &ResolvedSpec) -> Vec<ScalarType> {
    let all: Vec<ScalarType> = spec.type_domain.iter().collect();
    if matches!(spec.size_template, SizeTemplate::Shaped(_)) && !spec.size_template.is_sequence() {
        let numeric: Vec<ScalarType> = all.iter().copied().filter(|t| t.is_numeric()).collect();
        if !numeric.is_empty() {
            return numeric;
        }
    }
    all
}

fn same_type_source(spec: &ResolvedSpec, types: &HashMap<String, ScalarType>) -> Option<ScalarType> {
    spec.dep(|k| *k == DependencyKind::SameType)
        .and_then(|d| types.get(&d.source).copied())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DimMode {
    Sample,
    KeepPrevious,
}

/// Concrete shape for a shaped parameter; `None` for scalars.
fn resolve_shape<R: Rng>(
    spec: &ResolvedSpec,
    args: &IndexMap<String, EncodedValue>,
    prev: Option<&EncodedValue>,
    mode: DimMode,
    cfg: &GenConfig,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let size = spec.size_template.spec()?;
    let rank = size.rank();
    let same_shape: Option<Vec<usize>> = spec
        .dep(|k| *k == DependencyKind::SameShape)
        .and_then(|d| args.get(&d.source)?.as_array())
        .map(|a| a.shape().to_vec())
        .filter(|s| s.len() == rank);
    let prev_shape: Option<Vec<usize>> = prev
        .and_then(EncodedValue::as_array)
        .map(|a| a.shape().to_vec())
        .filter(|s| s.len() == rank);
    let keep = |i: usize| {
        (mode == DimMode::KeepPrevious)
            .then(|| prev_shape.as_ref().map(|s| s[i]))
            .flatten()
    };
    let dims = size
        .dims
        .iter()
        .enumerate()
        .map(|(i, dim)| match dim {
            DimSpec::Fixed(n) => *n,
            DimSpec::Ref { param, axis } => args
                .get(param)
                .and_then(EncodedValue::as_array)
                .and_then(|a| a.shape().get(*axis).copied())
                .unwrap_or(1),
            DimSpec::Var(_) => match (&same_shape, keep(i)) {
                (Some(src), _) => src[i],
                (None, Some(n)) if (1..=VAR_DIM_LIMIT).contains(&n) => n,
                _ => rng.random_range(cfg.dim_range.0 as u64..=cfg.dim_range.1 as u64) as usize,
            },
            DimSpec::ChannelSet(set) => match keep(i) {
                Some(n) if u8::try_from(n).is_ok_and(|c| set.contains(&c)) => n,
                _ => {
                    let options: Vec<u8> = set.iter().copied().collect();
                    pick(&options, rng).copied().unwrap_or(1) as usize
                }
            },
        })
        .collect();
    Some(dims)
}

/// Reorders generated arguments (topological order) into declaration order.
fn declaration_order(
    cs: &ApiConstraintSet,
    mut args: IndexMap<String, EncodedValue>,
) -> IndexMap<String, EncodedValue> {
    cs.specs
        .keys()
        .map(|k| (k.clone(), args.shift_remove(k).unwrap_or(EncodedValue::Null)))
        .collect()
}

/// A fresh case drawn from the index-`index` streams.
pub fn init_case_at(cs: &ApiConstraintSet, cfg: &GenConfig, index: u64) -> TestCase {
    let mut args: IndexMap<String, EncodedValue> = IndexMap::new();
    let mut types: HashMap<String, ScalarType> = HashMap::new();
    for name in &cs.order {
        let spec = &cs.specs[name];
        let mut rng = rng::stream(cfg.rng_seed, &cs.api_name, index, name);
        let value = match &spec.fixed_choices {
            Some(choices) => pick(choices, &mut rng).cloned().unwrap_or(EncodedValue::Null),
            None => {
                let candidates = candidate_types(spec);
                let t = same_type_source(spec, &types)
                    .filter(|t| candidates.contains(t))
                    .unwrap_or(candidates[0]);
                types.insert(name.clone(), t);
                let shape = resolve_shape(spec, &args, None, DimMode::Sample, cfg, &mut rng);
                fresh_value(spec, t, shape.as_deref(), &args, &mut rng)
            }
        };
        args.insert(name.clone(), value);
    }
    TestCase {
        api_name: cs.api_name.clone(),
        case_index: index,
        seed: cfg.rng_seed,
        args: declaration_order(cs, args),
        applied: AppliedStrategies::default(),
        validity_mode: ValidityMode::ValidOnly,
    }
}

/// The first case of a stream: every parameter at its first type, dims
/// drawn from `dim_range`, elements uniform in their range, all
/// dependencies satisfied.
pub fn init_case(cs: &ApiConstraintSet, cfg: &GenConfig) -> TestCase {
    init_case_at(cs, cfg, 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Injection {
    InvalidType(String),
    ExtremeSize(String),
}

fn injection_candidates(cs: &ApiConstraintSet, flags: &StrategyFlags) -> Vec<Injection> {
    let mut out = Vec::new();
    for (name, spec) in &cs.specs {
        if !spec.modifiable {
            continue;
        }
        if flags.type_ {
            out.push(Injection::InvalidType(name.clone()));
        }
        if flags.size && spec.size_template.spec().is_some_and(|s| s.has_var_dim()) {
            out.push(Injection::ExtremeSize(name.clone()));
        }
    }
    out
}

fn invalid_value(spec: &ResolvedSpec) -> EncodedValue {
    if spec.type_domain.iter().all(|t| t == ScalarType::String) {
        EncodedValue::Int(1)
    } else {
        EncodedValue::Str("fuzz".into())
    }
}

/// Derives case `index` from `prev`.
///
/// Unmodifiable parameters are redrawn from their fixed choices. Modifiable
/// ones get a type (kept if single, copied from a same-type source,
/// otherwise sampled when the Type strategy is on), a shape (fixed dims
/// kept, same-shape dims copied, others resampled when the Size strategy is
/// on) and a value: arrays matching the previous case's dtype and shape are
/// mutated in place by the case's value strategy, anything else is drawn
/// fresh. With probability `adversarial_ratio` one parameter additionally
/// receives an invalid type or an extreme dimension.
pub fn next_case(cs: &ApiConstraintSet, prev: &TestCase, cfg: &GenConfig, index: u64) -> TestCase {
    let flags = cfg.strategy_flags;
    if !flags.any() {
        return init_case_at(cs, cfg, index);
    }
    let mut case_rng = rng::case_stream_rng(cfg.rng_seed, &cs.api_name, index);
    let value_strategy = pick(&flags.value_strategies(), &mut case_rng).copied();
    let injection = if case_rng.random_bool(cfg.adversarial_ratio) {
        pick(&injection_candidates(cs, &flags), &mut case_rng).cloned()
    } else {
        None
    };

    let mut applied = AppliedStrategies {
        value_strategy: value_strategy.filter(|_| cs.specs.values().any(|s| s.modifiable)),
        ..AppliedStrategies::default()
    };
    let mut args: IndexMap<String, EncodedValue> = IndexMap::new();
    let mut types: HashMap<String, ScalarType> = HashMap::new();
    for name in &cs.order {
        let spec = &cs.specs[name];
        let mut rng = rng::stream(cfg.rng_seed, &cs.api_name, index, name);
        let value = if let Some(choices) = &spec.fixed_choices {
            pick(choices, &mut rng).cloned().unwrap_or(EncodedValue::Null)
        } else if injection == Some(Injection::InvalidType(name.clone())) {
            applied.type_strategy = Some(TypeStrategy::Invalid);
            invalid_value(spec)
        } else {
            let prev_v = prev.args.get(name);
            let candidates = candidate_types(spec);
            let prev_t = prev_v.and_then(|v| candidates.iter().copied().find(|t| fits_type(v, *t)));
            let t = if candidates.len() == 1 {
                candidates[0]
            } else if let Some(t) = same_type_source(spec, &types).filter(|t| candidates.contains(t)) {
                t
            } else if flags.type_ {
                applied.type_strategy.get_or_insert(TypeStrategy::Valid);
                *pick(&candidates, &mut rng).expect("type domain is non-empty")
            } else {
                prev_t.unwrap_or(candidates[0])
            };
            types.insert(name.clone(), t);

            let mode = if flags.size {
                DimMode::Sample
            } else {
                DimMode::KeepPrevious
            };
            let mut shape = resolve_shape(spec, &args, prev_v, mode, cfg, &mut rng);
            if flags.size
                && spec
                    .size_template
                    .spec()
                    .is_some_and(|s| s.has_var_dim() || s.dims.iter().any(|d| matches!(d, DimSpec::ChannelSet(_))))
            {
                applied.size_strategy.get_or_insert(SizeStrategy::Resample);
            }
            if injection == Some(Injection::ExtremeSize(name.clone())) {
                let size = spec.size_template.spec().expect("only shaped params are candidates");
                let var_axes: Vec<usize> = size
                    .dims
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| matches!(d, DimSpec::Var(_)))
                    .map(|(i, _)| i)
                    .collect();
                let axis = *pick(&var_axes, &mut rng).expect("candidate has a Var dim");
                let extent = *pick(&cfg.extreme_dims, &mut rng).expect("validated non-empty");
                if let Some(s) = shape.as_mut() {
                    s[axis] = extent;
                }
                applied.size_strategy = Some(SizeStrategy::Extreme);
            }

            let is_array = shape.is_some() && !spec.size_template.is_sequence() && t.element_size().is_some();
            match (is_array, value_strategy) {
                (true, Some(strategy)) => {
                    let shape = shape.expect("arrays are shaped");
                    let base = match prev_v.and_then(EncodedValue::as_array) {
                        Some(a) if a.dtype() == t && a.shape() == shape.as_slice() => a.clone(),
                        _ => match fresh_value(spec, t, Some(&shape), &args, &mut rng) {
                            EncodedValue::NdArray(a) => a,
                            _ => unreachable!("numeric shaped values are arrays"),
                        },
                    };
                    let mutated = apply_value_strategy(&base, strategy, cfg, &mut rng);
                    EncodedValue::NdArray(ElementBounds::new(spec, t, &args).clamp(mutated))
                }
                _ => fresh_value(spec, t, shape.as_deref(), &args, &mut rng),
            }
        };
        args.insert(name.clone(), value);
    }
    let validity_mode = if injection.is_some() {
        ValidityMode::Adversarial
    } else {
        ValidityMode::ValidOnly
    };
    TestCase {
        api_name: cs.api_name.clone(),
        case_index: index,
        seed: cfg.rng_seed,
        args: declaration_order(cs, args),
        applied,
        validity_mode,
    }
}
