//! Concrete argument values and their JSON encoding.
//!
//! Every value crossing a process boundary (test-case dumps, the worker wire
//! protocol, bug reports) is an [`EncodedValue`]. The JSON form is tagged by a
//! `kind` field; array payloads are base64 of little-endian C-order bytes so
//! that round trips are bit-exact.

use std::fmt;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

/// Element types understood by the IR and the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarType {
    Uint8,
    Int32,
    Float32,
    Float64,
    Bool,
    String,
    Enum,
}

impl ScalarType {
    pub const ALL: [ScalarType; 7] = [
        ScalarType::Uint8,
        ScalarType::Int32,
        ScalarType::Float32,
        ScalarType::Float64,
        ScalarType::Bool,
        ScalarType::String,
        ScalarType::Enum,
    ];

    /// Byte width of one array element, `None` for types that cannot back an array.
    pub fn element_size(self) -> Option<usize> {
        match self {
            ScalarType::Uint8 | ScalarType::Bool => Some(1),
            ScalarType::Int32 | ScalarType::Float32 => Some(4),
            ScalarType::Float64 => Some(8),
            ScalarType::String | ScalarType::Enum => None,
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, ScalarType::Uint8 | ScalarType::Int32)
    }

    pub fn is_float(self) -> bool {
        matches!(self, ScalarType::Float32 | ScalarType::Float64)
    }

    pub fn is_numeric(self) -> bool {
        self.is_integer() || self.is_float()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScalarType::Uint8 => "uint8",
            ScalarType::Int32 => "int32",
            ScalarType::Float32 => "float32",
            ScalarType::Float64 => "float64",
            ScalarType::Bool => "bool",
            ScalarType::String => "string",
            ScalarType::Enum => "enum",
        }
    }

    /// Inclusive representable range for integer types.
    pub fn integer_limits(self) -> Option<(i64, i64)> {
        match self {
            ScalarType::Uint8 => Some((0, 255)),
            ScalarType::Int32 => Some((i32::MIN as i64, i32::MAX as i64)),
            ScalarType::Bool => Some((0, 1)),
            _ => None,
        }
    }
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScalarType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScalarType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown scalar type `{s}`"))
    }
}

/// A dense n-dimensional array stored as raw little-endian C-order bytes.
#[derive(Debug, Clone)]
pub struct NdArray {
    dtype: ScalarType,
    shape: Vec<usize>,
    data: Vec<u8>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ArrayError {
    #[error("dtype `{0}` cannot back an array")]
    UnsupportedDtype(ScalarType),
    #[error("payload is {actual} bytes, shape {shape:?} of {dtype} needs {expected}")]
    LengthMismatch {
        dtype: ScalarType,
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("shape {0:?} overflows the addressable size")]
    Overflow(Vec<usize>),
}

impl NdArray {
    pub fn from_bytes(dtype: ScalarType, shape: Vec<usize>, data: Vec<u8>) -> Result<Self, ArrayError> {
        let size = dtype.element_size().ok_or(ArrayError::UnsupportedDtype(dtype))?;
        let count = element_count(&shape).ok_or_else(|| ArrayError::Overflow(shape.clone()))?;
        let expected = count
            .checked_mul(size)
            .ok_or_else(|| ArrayError::Overflow(shape.clone()))?;
        if data.len() != expected {
            return Err(ArrayError::LengthMismatch {
                dtype,
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(NdArray { dtype, shape, data })
    }

    /// Builds an array from `f64` values, converting each to `dtype`.
    ///
    /// Integer dtypes round to nearest and saturate at the dtype limits; bool
    /// maps non-zero to 1.
    pub fn from_f64(dtype: ScalarType, shape: Vec<usize>, values: &[f64]) -> Result<Self, ArrayError> {
        Self::encode(dtype, shape, values.len(), values.iter().copied())
    }

    /// Builds an array whose element `k` (row-major) is `f(k)`, converted as
    /// in [`NdArray::from_f64`].
    pub fn from_fn(dtype: ScalarType, shape: Vec<usize>, f: impl FnMut(usize) -> f64) -> Result<Self, ArrayError> {
        let count = element_count(&shape).ok_or_else(|| ArrayError::Overflow(shape.clone()))?;
        Self::encode(dtype, shape, count, (0..count).map(f))
    }

    fn encode(
        dtype: ScalarType,
        shape: Vec<usize>,
        count: usize,
        values: impl Iterator<Item = f64>,
    ) -> Result<Self, ArrayError> {
        let size = dtype.element_size().ok_or(ArrayError::UnsupportedDtype(dtype))?;
        let mut data = Vec::with_capacity(count.saturating_mul(size));
        match dtype {
            ScalarType::Uint8 => data.extend(values.map(|v| saturate(v, 0.0, 255.0) as u8)),
            ScalarType::Bool => data.extend(values.map(|v| u8::from(v != 0.0))),
            ScalarType::Int32 => {
                for v in values {
                    data.extend_from_slice(&(saturate(v, i32::MIN as f64, i32::MAX as f64) as i32).to_le_bytes());
                }
            }
            ScalarType::Float32 => {
                for v in values {
                    data.extend_from_slice(&(v as f32).to_le_bytes());
                }
            }
            ScalarType::Float64 => {
                for v in values {
                    data.extend_from_slice(&v.to_le_bytes());
                }
            }
            ScalarType::String | ScalarType::Enum => unreachable!("element_size rejects these"),
        }
        NdArray::from_bytes(dtype, shape, data)
    }

    pub fn zeros(dtype: ScalarType, shape: Vec<usize>) -> Result<Self, ArrayError> {
        let size = dtype.element_size().ok_or(ArrayError::UnsupportedDtype(dtype))?;
        let count = element_count(&shape).ok_or_else(|| ArrayError::Overflow(shape.clone()))?;
        NdArray::from_bytes(dtype, shape, vec![0; count * size])
    }

    pub fn dtype(&self) -> ScalarType {
        self.dtype
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dtype.element_size().unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get_f64(&self, index: usize) -> f64 {
        let size = self.dtype.element_size().unwrap_or(1);
        let b = &self.data[index * size..(index + 1) * size];
        match self.dtype {
            ScalarType::Uint8 | ScalarType::Bool => b[0] as f64,
            ScalarType::Int32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            ScalarType::Float32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            ScalarType::Float64 => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
            ScalarType::String | ScalarType::Enum => unreachable!("validated at construction"),
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        let d = &self.data;
        match self.dtype {
            ScalarType::Uint8 | ScalarType::Bool => d.iter().map(|&b| b as f64).collect(),
            ScalarType::Int32 => d
                .chunks_exact(4)
                .map(|b| i32::from_le_bytes(b.try_into().unwrap()) as f64)
                .collect(),
            ScalarType::Float32 => d
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
                .collect(),
            ScalarType::Float64 => d
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect(),
            ScalarType::String | ScalarType::Enum => unreachable!("validated at construction"),
        }
    }

    /// Rebuilds the array with the same dtype and shape from new element values.
    pub fn with_values(&self, values: &[f64]) -> NdArray {
        debug_assert_eq!(values.len(), self.len());
        NdArray::from_f64(self.dtype, self.shape.clone(), values).expect("same dtype and shape")
    }

    /// Rebuilds the array with element `k` replaced by `f(k, x)`, converted
    /// as in [`NdArray::from_f64`].
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> NdArray {
        let (d, n) = (&self.data, self.len());
        let shape = self.shape.clone();
        let mut k = 0;
        let mut g = move |x: f64| {
            k += 1;
            f(k - 1, x)
        };
        match self.dtype {
            ScalarType::Uint8 | ScalarType::Bool => Self::encode(self.dtype, shape, n, d.iter().map(|&b| g(b as f64))),
            ScalarType::Int32 => Self::encode(
                self.dtype,
                shape,
                n,
                d.chunks_exact(4)
                    .map(|b| g(i32::from_le_bytes(b.try_into().unwrap()) as f64)),
            ),
            ScalarType::Float32 => Self::encode(
                self.dtype,
                shape,
                n,
                d.chunks_exact(4)
                    .map(|b| g(f32::from_le_bytes(b.try_into().unwrap()) as f64)),
            ),
            ScalarType::Float64 => Self::encode(
                self.dtype,
                shape,
                n,
                d.chunks_exact(8).map(|b| g(f64::from_le_bytes(b.try_into().unwrap()))),
            ),
            ScalarType::String | ScalarType::Enum => unreachable!("validated at construction"),
        }
        .expect("same dtype and shape")
    }

    /// True if any element is NaN or infinite.
    pub fn has_non_finite(&self) -> bool {
        match self.dtype {
            ScalarType::Float32 => self
                .data
                .chunks_exact(4)
                .any(|b| !f32::from_le_bytes(b.try_into().unwrap()).is_finite()),
            ScalarType::Float64 => self
                .data
                .chunks_exact(8)
                .any(|b| !f64::from_le_bytes(b.try_into().unwrap()).is_finite()),
            _ => false,
        }
    }
}

impl PartialEq for NdArray {
    fn eq(&self, other: &Self) -> bool {
        self.dtype == other.dtype && self.shape == other.shape && self.data == other.data
    }
}

impl Eq for NdArray {}

pub(crate) fn element_count(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

fn saturate(v: f64, lo: f64, hi: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        round_half_away(v).clamp(lo, hi)
    }
}

/// `f64::round` without the libm call.
#[inline]
pub fn round_half_away(v: f64) -> f64 {
    if !(v.abs() < 4_503_599_627_370_496.0) {
        return v;
    }
    let t = v as i64 as f64;
    let d = v - t;
    let r = if d >= 0.5 {
        t + 1.0
    } else if d <= -0.5 {
        t - 1.0
    } else {
        t
    };
    r.copysign(v)
}

/// A concrete parameter value.
#[derive(Debug, Clone)]
pub enum EncodedValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    Null,
    Enum { name: String, value: i64 },
    Seq(Vec<EncodedValue>),
    NdArray(NdArray),
}

impl EncodedValue {
    pub fn kind(&self) -> &'static str {
        match self {
            EncodedValue::Int(_) => "int",
            EncodedValue::Float(_) => "float",
            EncodedValue::Bool(_) => "bool",
            EncodedValue::Str(_) => "str",
            EncodedValue::Null => "null",
            EncodedValue::Enum { .. } => "enum",
            EncodedValue::Seq(_) => "seq",
            EncodedValue::NdArray(_) => "ndarray",
        }
    }

    pub fn as_array(&self) -> Option<&NdArray> {
        match self {
            EncodedValue::NdArray(a) => Some(a),
            _ => None,
        }
    }

    /// Numeric view of a scalar value.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            EncodedValue::Int(i) => Some(*i as f64),
            EncodedValue::Float(f) => Some(*f),
            EncodedValue::Bool(b) => Some(f64::from(u8::from(*b))),
            EncodedValue::Enum { value, .. } => Some(*value as f64),
            _ => None,
        }
    }

    /// True if this value, or anything nested in it, holds a NaN or infinity.
    pub fn has_non_finite(&self) -> bool {
        match self {
            EncodedValue::Float(f) => !f.is_finite(),
            EncodedValue::Seq(items) => items.iter().any(EncodedValue::has_non_finite),
            EncodedValue::NdArray(a) => a.has_non_finite(),
            _ => false,
        }
    }
}

// Floats compare by bit pattern so NaN payloads survive equality checks.
impl PartialEq for EncodedValue {
    fn eq(&self, other: &Self) -> bool {
        use EncodedValue::*;
        match (self, other) {
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (Bool(a), Bool(b)) => a == b,
            (Str(a), Str(b)) => a == b,
            (Null, Null) => true,
            (Enum { name: n1, value: v1 }, Enum { name: n2, value: v2 }) => n1 == n2 && v1 == v2,
            (Seq(a), Seq(b)) => a == b,
            (NdArray(a), NdArray(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for EncodedValue {}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Repr {
    Int {
        value: i64,
    },
    Float {
        value: FloatRepr,
    },
    Bool {
        value: bool,
    },
    Str {
        value: String,
    },
    Null,
    Enum {
        name: String,
        value: i64,
    },
    Seq {
        items: Vec<EncodedValue>,
    },
    Ndarray {
        dtype: ScalarType,
        shape: Vec<u64>,
        data: String,
    },
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ReprRef<'a> {
    Int {
        value: i64,
    },
    Float {
        value: FloatRepr,
    },
    Bool {
        value: bool,
    },
    Str {
        value: &'a str,
    },
    Null,
    Enum {
        name: &'a str,
        value: i64,
    },
    Seq {
        items: &'a [EncodedValue],
    },
    Ndarray {
        dtype: ScalarType,
        shape: &'a [usize],
        data: Box<RawValue>,
    },
}

/// The base64 payload as a ready-made JSON string. Base64 never needs
/// escaping, so this skips the serializer's per-byte escape scan.
fn base64_literal(data: &[u8]) -> Box<RawValue> {
    let mut lit = String::with_capacity(data.len().div_ceil(3) * 4 + 2);
    lit.push('"');
    B64.encode_string(data, &mut lit);
    lit.push('"');
    RawValue::from_string(lit).expect("base64 is a valid JSON string body")
}

/// JSON has no NaN or infinity, so non-finite floats travel as strings.
struct FloatRepr(f64);

impl Serialize for FloatRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v == f64::INFINITY {
            s.serialize_str("inf")
        } else if v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(v)
        }
    }
}

impl<'de> Deserialize<'de> for FloatRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Num(f64),
            Text(String),
        }
        match Either::deserialize(d)? {
            Either::Num(v) => Ok(FloatRepr(v)),
            Either::Text(t) => match t.as_str() {
                "nan" => Ok(FloatRepr(f64::NAN)),
                "inf" => Ok(FloatRepr(f64::INFINITY)),
                "-inf" => Ok(FloatRepr(f64::NEG_INFINITY)),
                other => Err(D::Error::custom(format!("invalid float literal `{other}`"))),
            },
        }
    }
}

impl Serialize for EncodedValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            EncodedValue::Int(v) => ReprRef::Int { value: *v },
            EncodedValue::Float(v) => ReprRef::Float { value: FloatRepr(*v) },
            EncodedValue::Bool(v) => ReprRef::Bool { value: *v },
            EncodedValue::Str(v) => ReprRef::Str { value: v },
            EncodedValue::Null => ReprRef::Null,
            EncodedValue::Enum { name, value } => ReprRef::Enum { name, value: *value },
            EncodedValue::Seq(items) => ReprRef::Seq { items },
            EncodedValue::NdArray(a) => ReprRef::Ndarray {
                dtype: a.dtype,
                shape: &a.shape,
                data: base64_literal(&a.data),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EncodedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Int { value } => EncodedValue::Int(value),
            Repr::Float { value } => EncodedValue::Float(value.0),
            Repr::Bool { value } => EncodedValue::Bool(value),
            Repr::Str { value } => EncodedValue::Str(value),
            Repr::Null => EncodedValue::Null,
            Repr::Enum { name, value } => EncodedValue::Enum { name, value },
            Repr::Seq { items } => EncodedValue::Seq(items),
            Repr::Ndarray { dtype, shape, data } => {
                let bytes = B64.decode(data.as_bytes()).map_err(D::Error::custom)?;
                let shape = shape
                    .into_iter()
                    .map(|d| usize::try_from(d).map_err(D::Error::custom))
                    .collect::<Result<Vec<_>, _>>()?;
                EncodedValue::NdArray(NdArray::from_bytes(dtype, shape, bytes).map_err(D::Error::custom)?)
            }
        })
    }
}
