//! Value strategies: Gaussian noise, rectangular masking and division.

use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::GenConfig;
use crate::value::NdArray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueStrategy {
    Noise,
    Mask,
    Division,
}

impl ValueStrategy {
    pub const ALL: [ValueStrategy; 3] = [ValueStrategy::Noise, ValueStrategy::Mask, ValueStrategy::Division];
}

/// Axis-aligned region over the first two axes; later axes are covered fully.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskRect {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

impl MaskRect {
    pub fn full(shape: &[usize]) -> Self {
        MaskRect {
            rows: 0..shape.first().copied().unwrap_or(1),
            cols: 0..shape.get(1).copied().unwrap_or(1),
        }
    }
}

fn sub_range<R: Rng>(n: usize, rng: &mut R) -> Range<usize> {
    if n == 0 {
        return 0..0;
    }
    let a = rng.random_range(0..n as u64) as usize;
    let b = rng.random_range(0..n as u64) as usize;
    a.min(b)..a.max(b) + 1
}

/// Draws a mask rectangle; a quarter of the draws cover the whole array.
pub fn mask_rect<R: Rng>(shape: &[usize], rng: &mut R) -> MaskRect {
    if rng.random_bool(0.25) {
        return MaskRect::full(shape);
    }
    MaskRect {
        rows: sub_range(shape.first().copied().unwrap_or(1), rng),
        cols: sub_range(shape.get(1).copied().unwrap_or(1), rng),
    }
}

pub fn apply_mask(v: &NdArray, rect: &MaskRect, value: f64) -> NdArray {
    let shape = v.shape();
    let cols = shape.get(1).copied().unwrap_or(1);
    let inner: usize = shape.iter().skip(2).product();
    let mut vals = v.to_f64_vec();
    if shape.is_empty() {
        if !rect.rows.is_empty() && !rect.cols.is_empty() {
            vals.iter_mut().for_each(|x| *x = value);
        }
        return v.with_values(&vals);
    }
    for r in rect.rows.clone() {
        for c in rect.cols.clone() {
            let start = (r * cols + c) * inner;
            if let Some(chunk) = vals.get_mut(start..start + inner) {
                chunk.iter_mut().for_each(|x| *x = value);
            }
        }
    }
    v.with_values(&vals)
}

/// Divides every element by `d`; integer dtypes use floor division.
pub fn apply_division(v: &NdArray, d: i64) -> NdArray {
    let d = d as f64;
    if v.dtype().is_integer() {
        v.map_values(|_, x| (x / d).floor())
    } else {
        v.map_values(|_, x| x / d)
    }
}

pub fn apply_noise<R: Rng>(v: &NdArray, sigma: f64, rng: &mut R) -> NdArray {
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    v.map_values(|_, x| x + normal.sample(rng))
}

/// Noise standard deviation for `v`'s dtype.
pub fn noise_sigma(v: &NdArray, cfg: &GenConfig) -> f64 {
    if v.dtype().is_float() {
        cfg.noise_sigma_relative
    } else {
        cfg.noise_sigma
    }
}

/// Applies one value strategy, preserving shape and dtype. Integer results
/// saturate at the dtype's limits.
pub fn apply_value_strategy<R: Rng>(v: &NdArray, s: ValueStrategy, cfg: &GenConfig, rng: &mut R) -> NdArray {
    if !v.dtype().is_numeric() {
        return v.clone();
    }
    match s {
        ValueStrategy::Noise => apply_noise(v, noise_sigma(v, cfg), rng),
        ValueStrategy::Mask => {
            let rect = mask_rect(v.shape(), rng);
            let (lo, hi) = cfg.mask_value_range;
            let value = rng.random_range(lo..=hi) as f64;
            apply_mask(v, &rect, value)
        }
        ValueStrategy::Division => {
            let d = cfg.divisors[rng.random_range(0..cfg.divisors.len() as u64) as usize];
            apply_division(v, d)
        }
    }
}
