//! Keyword rules mapping a parameter's description text to structured fields.
//!
//! Rules are applied in a fixed precedence so the outcome never depends on
//! phrasing order: an enumerated value list wins over everything, then
//! colour, explicit `AxB` sizes, point lists, single points/pairs and
//! finally image-like arrays. Types, ranges, defaults and dependencies are
//! detected independently.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;

use crate::schema::{
    DependencyEdge, DependencyKind, DescriptionSpec, DimSpec, DimSymbol, ParamInfo, SizeSpec, TypeDomain, ValueRange,
};
use crate::value::{EncodedValue, ScalarType};

const NUM: &str = r"(-?\d+(?:\.\d+)?)";

fn re(pattern: &str) -> Regex {
    Regex::new(pattern).expect("static pattern")
}

static FLOAT64: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:double(?: precision)?|float64|cv_64f)\b"));
static FLOAT32: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:float32|float|floating-point|cv_32f)\b"));
static UINT8: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:uint8|8-bit|cv_8u)\b"));
static INT32: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:int32|int|integers?|cv_32s)\b"));
static BOOL: LazyLock<Regex> = LazyLock::new(|| re(r"\bbool(?:ean)?\b"));
static STRING: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:string|str)\b"));

static ONE_OF: LazyLock<Regex> = LazyLock::new(|| re(r"(?i)\bone of\s+(.+?)(?:\.\s|\.?\s*$)"));
static ENUM_ITEM: LazyLock<Regex> = LazyLock::new(|| re(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\s*=\s*(-?\d+))?$"));
static EXPLICIT_DIMS: LazyLock<Regex> = LazyLock::new(|| re(r"\b(\d+)\s*x\s*(\d+)(?:\s*x\s*(\d+))?\b"));
static N_POINTS: LazyLock<Regex> = LazyLock::new(|| re(r"\b(\d+)\s+(?:points|pts)\b"));
static POINTS_WORD: LazyLock<Regex> = LazyLock::new(|| re(r"\b(?:points|pts)\b"));
static PAIR_WORD: LazyLock<Regex> = LazyLock::new(|| re(r"\bpair\b"));
static IMAGE_NOUN: LazyLock<Regex> = LazyLock::new(|| re(r"^(?:image|images|img|array|arrays|matrix|mat)$"));
static CHANNEL_SPAN: LazyLock<Regex> = LazyLock::new(|| re(r"\b([1-4])\s+to\s+([1-4])\s+channels\b"));
static BETWEEN: LazyLock<Regex> = LazyLock::new(|| re(&format!(r"\bbetween\s+{NUM}\s+and\s+{NUM}")));
static HALF_OPEN: LazyLock<Regex> = LazyLock::new(|| re(&format!(r"\[\s*{NUM}\s*,\s*{NUM}\s*\)")));
static FROM_TO: LazyLock<Regex> = LazyLock::new(|| re(&format!(r"\b(?:ranges? of|from)\s+{NUM}\s+to\s+{NUM}")));
static SAME_SIZE_TYPE: LazyLock<Regex> =
    LazyLock::new(|| re(r"\bsame (?:size and type|type and size|shape and type) as (\w+)"));
static SAME_SIZE: LazyLock<Regex> = LazyLock::new(|| re(r"\bsame (?:size|shape) as (\w+)"));
static SAME_TYPE: LazyLock<Regex> = LazyLock::new(|| re(r"\bsame (?:type|depth) as (\w+)"));
static AS_PARAM: LazyLock<Regex> = LazyLock::new(|| re(r"\bas (\w+)"));
static DEFAULT: LazyLock<Regex> = LazyLock::new(|| re(r"(?i)\bdefault(?: value)? is\s+([^\s,;]+)"));

const PREPOSITIONS: [&str; 13] = [
    "of", "in", "to", "for", "with", "where", "at", "on", "from", "by", "into", "that", "which",
];
const POINT_NAMES: [&str; 4] = ["center", "pt", "point", "anchor"];
const IMAGE_NAMES: [&str; 3] = ["image", "img", "src"];

/// Lowercase with trailing digits removed, so `image1` and `image2` agree.
pub fn normalize_param_name(name: &str) -> String {
    name.to_lowercase()
        .trim_end_matches(|c: char| c.is_ascii_digit())
        .to_string()
}

/// Scalar types mentioned in `text`, in order of first appearance.
pub fn detect_types(text: &str) -> Vec<ScalarType> {
    let lower = text.to_lowercase();
    let mut hits: Vec<(usize, ScalarType)> = Vec::new();
    let mut blanked = lower.clone();
    for m in FLOAT64.find_iter(&lower) {
        hits.push((m.start(), ScalarType::Float64));
        blanked.replace_range(m.range(), &" ".repeat(m.len()));
    }
    for (pattern, ty) in [
        (&*FLOAT32, ScalarType::Float32),
        (&*UINT8, ScalarType::Uint8),
        (&*INT32, ScalarType::Int32),
        (&*BOOL, ScalarType::Bool),
        (&*STRING, ScalarType::String),
    ] {
        hits.extend(pattern.find_iter(&blanked).map(|m| (m.start(), ty)));
    }
    hits.sort_by_key(|(pos, _)| *pos);
    let mut out = Vec::new();
    for (_, t) in hits {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn parse_options(text: &str) -> Option<Vec<EncodedValue>> {
    let caps = ONE_OF.captures(text)?;
    let list = caps[1].trim().trim_end_matches('.');
    let items: Vec<&str> = list
        .split(',')
        .flat_map(|s| s.split(" or "))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return None;
    }
    if let Ok(ints) = items.iter().map(|s| s.parse::<i64>()).collect::<Result<Vec<_>, _>>() {
        let mut seen = BTreeSet::new();
        return Some(
            ints.into_iter()
                .filter(|v| seen.insert(*v))
                .map(EncodedValue::Int)
                .collect(),
        );
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let c = ENUM_ITEM.captures(item)?;
        let value = match c.get(2) {
            Some(v) => v.as_str().parse().ok()?,
            None => i as i64,
        };
        out.push(EncodedValue::Enum {
            name: c[1].to_string(),
            value,
        });
    }
    Some(out)
}

fn parse_number(s: &str) -> f64 {
    s.parse().expect("regex only captures numbers")
}

fn detect_range(text: &str, integer: bool) -> Option<ValueRange> {
    let lower = text.to_lowercase();
    let range = if let Some(c) = BETWEEN.captures(&lower) {
        let (lo, hi) = (parse_number(&c[1]), parse_number(&c[2]));
        ValueRange::new(lo, if integer { hi + 1.0 } else { hi })
    } else if let Some(c) = HALF_OPEN.captures(&lower).or_else(|| FROM_TO.captures(&lower)) {
        ValueRange::new(parse_number(&c[1]), parse_number(&c[2]))
    } else {
        return None;
    };
    (range.lo < range.hi).then_some(range)
}

fn detect_channels(lower: &str) -> Option<BTreeSet<u8>> {
    let mut set = BTreeSet::new();
    let table: [(&[&str], u8); 4] = [
        (
            &[
                "grayscale",
                "single-channel",
                "single channel",
                "1-channel",
                "one-channel",
            ],
            1,
        ),
        (&["two-channel", "2-channel", "dual-channel"], 2),
        (&["three-channel", "3-channel"], 3),
        (&["four-channel", "4-channel"], 4),
    ];
    for (words, c) in table {
        if words.iter().any(|w| lower.contains(w)) {
            set.insert(c);
        }
    }
    for c in CHANNEL_SPAN.captures_iter(lower) {
        let (a, b): (u8, u8) = (c[1].parse().unwrap(), c[2].parse().unwrap());
        set.extend(a.min(b)..=a.max(b));
    }
    (!set.is_empty()).then_some(set)
}

/// True if an image/array noun appears in the first clause before any preposition.
fn mentions_array(lower: &str) -> bool {
    let clause = lower.split([',', '.', ';']).next().unwrap_or("");
    for word in clause.split_whitespace() {
        if PREPOSITIONS.contains(&word) {
            return false;
        }
        if IMAGE_NOUN.is_match(word) {
            return true;
        }
    }
    false
}

fn is_image_like(p: &ParamInfo) -> bool {
    matches!(
        p.size_spec.as_ref().map(|s| s.dims.as_slice()),
        Some([DimSpec::Var(DimSymbol::H), DimSpec::Var(DimSymbol::W), ..])
    )
}

fn bound_to_first_image(earlier: &[ParamInfo]) -> Option<DependencyEdge> {
    earlier
        .iter()
        .find(|p| is_image_like(p))
        .map(|p| DependencyEdge::new(&p.name, DependencyKind::BoundedByShape { axes: [1, 0] }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ShapeKind {
    Scalar,
    Color,
    Explicit,
    Points,
    Point,
    Image,
}

/// Infers one parameter's structured fields from its name and description.
///
/// `earlier` holds the already-inferred parameters declared before this one;
/// dependencies are only ever drawn to those.
pub fn infer_param(name: &str, text: &str, earlier: &[ParamInfo]) -> ParamInfo {
    let mut info = ParamInfo::unconstrained(name, text);
    if text.trim().is_empty() {
        return info;
    }
    let lower = text.to_lowercase();
    let norm = normalize_param_name(name);
    let mut types = detect_types(text);

    if let Some(options) = parse_options(text) {
        let ty = if options.iter().all(|o| matches!(o, EncodedValue::Int(_))) {
            ScalarType::Int32
        } else {
            ScalarType::Enum
        };
        info.flag = false;
        info.type_domain = TypeDomain::new([ty]);
        info.default = detect_default(text, &options, &[ty]);
        info.description = DescriptionSpec {
            raw_text: text.to_string(),
            value_range: None,
            options: Some(options),
            depends_on: Vec::new(),
        };
        return info;
    }

    let mut deps = Vec::new();
    let explicit = EXPLICIT_DIMS.captures(&lower);
    let shape = if norm.contains("color") {
        ShapeKind::Color
    } else if explicit.is_some() {
        ShapeKind::Explicit
    } else if norm.ends_with("points") || norm.ends_with("pts") || POINTS_WORD.is_match(&lower) {
        ShapeKind::Points
    } else if POINT_NAMES.contains(&norm.as_str()) || PAIR_WORD.is_match(&lower) {
        ShapeKind::Point
    } else if IMAGE_NAMES.contains(&norm.as_str()) || mentions_array(&lower) {
        ShapeKind::Image
    } else {
        ShapeKind::Scalar
    };

    let channels = detect_channels(&lower);
    let mut range = None;
    info.size_spec = match shape {
        ShapeKind::Scalar => None,
        ShapeKind::Color => {
            if types.is_empty() {
                types.push(ScalarType::Uint8);
            }
            range = Some(ValueRange::new(0.0, 256.0));
            Some(SizeSpec::new(vec![DimSpec::Fixed(3)]))
        }
        ShapeKind::Explicit => {
            let c = explicit.expect("checked above");
            let dims = (1..=3)
                .filter_map(|i| c.get(i))
                .map(|m| DimSpec::Fixed(m.as_str().parse().unwrap_or(1).max(1)))
                .collect();
            Some(SizeSpec::new(dims))
        }
        ShapeKind::Points => {
            let n = N_POINTS
                .captures(&lower)
                .and_then(|c| c[1].parse::<usize>().ok())
                .filter(|n| *n >= 1)
                .map_or(DimSpec::Var(DimSymbol::N), DimSpec::Fixed);
            deps.extend(bound_to_first_image(earlier));
            Some(SizeSpec::new(vec![n, DimSpec::Fixed(1), DimSpec::Fixed(2)]))
        }
        ShapeKind::Point => {
            if POINT_NAMES.contains(&norm.as_str()) {
                deps.extend(bound_to_first_image(earlier));
            }
            Some(SizeSpec::new(vec![DimSpec::Fixed(2)]))
        }
        ShapeKind::Image => Some(SizeSpec::image(channels.clone().unwrap_or_else(|| [3].into()))),
    };

    let integer = !types.is_empty() && types.iter().all(|t| t.is_integer());
    if let Some(r) = detect_range(text, integer) {
        range = Some(r);
    }

    let is_earlier = |p: &str| earlier.iter().any(|e| e.name == p) && p != name;
    let mut same_type = None;
    let mut same_shape = None;
    if let Some(c) = SAME_SIZE_TYPE.captures(&lower) {
        same_type = Some(c[1].to_string());
        same_shape = Some(c[1].to_string());
    }
    if same_shape.is_none() {
        same_shape = SAME_SIZE.captures(&lower).map(|c| c[1].to_string());
    }
    if same_type.is_none() {
        same_type = SAME_TYPE.captures(&lower).map(|c| c[1].to_string());
    }
    if same_type.is_none() && same_shape.is_none() {
        same_type = AS_PARAM
            .captures_iter(&lower)
            .map(|c| c[1].to_string())
            .find(|p| earlier.iter().any(|e| e.name.to_lowercase() == *p));
    }
    // resolve lowercase captures back to declared names
    let resolve = |p: Option<String>| {
        p.and_then(|p| {
            earlier
                .iter()
                .find(|e| e.name.to_lowercase() == p)
                .map(|e| e.name.clone())
        })
        .filter(|p| is_earlier(p))
    };
    if let Some(src) = resolve(same_type) {
        let source = earlier.iter().find(|e| e.name == src).expect("resolved");
        if !source.type_domain.is_empty() {
            types = source.type_domain.as_slice().to_vec();
        }
        deps.push(DependencyEdge::new(src, DependencyKind::SameType));
    }
    if let Some(src) = resolve(same_shape) {
        let source = earlier.iter().find(|e| e.name == src).expect("resolved");
        if let Some(src_size) = &source.size_spec {
            let mut size = src_size.clone();
            if let (Some(own), Some(DimSpec::ChannelSet(_))) = (&channels, size.dims.last()) {
                *size.dims.last_mut().expect("non-empty") = DimSpec::ChannelSet(own.clone());
            }
            info.size_spec = Some(size);
            deps.push(DependencyEdge::new(src, DependencyKind::SameShape));
        }
    }

    if info.size_spec.is_some() && !types.is_empty() && types.iter().all(|t| !t.is_numeric()) {
        info.size_spec = None;
        deps.retain(|d| !matches!(d.kind, DependencyKind::BoundedByShape { .. }));
    }

    info.type_domain = TypeDomain::new(types);
    info.default = detect_default(text, &[], info.type_domain.as_slice());
    info.description = DescriptionSpec {
        raw_text: text.to_string(),
        value_range: range,
        options: None,
        depends_on: deps,
    };
    info
}

fn detect_default(text: &str, options: &[EncodedValue], types: &[ScalarType]) -> Option<EncodedValue> {
    let c = DEFAULT.captures(text)?;
    let token = c[1].trim_end_matches(['.', ')']);
    if let Some(opt) = options.iter().find(|o| match o {
        EncodedValue::Enum { name, .. } => name == token,
        other => other.as_f64().is_some_and(|v| token.parse::<f64>() == Ok(v)),
    }) {
        return Some(opt.clone());
    }
    if let Ok(i) = token.parse::<i64>() {
        if types.iter().any(|t| t.is_float()) {
            return Some(EncodedValue::Float(i as f64));
        }
        return Some(EncodedValue::Int(i));
    }
    if let Ok(f) = token.parse::<f64>() {
        return Some(EncodedValue::Float(f));
    }
    match token.to_lowercase().as_str() {
        "true" => Some(EncodedValue::Bool(true)),
        "false" => Some(EncodedValue::Bool(false)),
        _ => None,
    }
}
