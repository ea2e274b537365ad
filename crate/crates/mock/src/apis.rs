use docfuzz_core::{EncodedValue, NdArray, ScalarType};

use crate::MockOutcome;

type Out = Result<Vec<EncodedValue>, MockOutcome>;
type Api = fn(&[EncodedValue]) -> Out;

pub(crate) const TABLE: &[(&str, Api)] = &[
    ("getRotationMatrix2D", get_rotation_matrix_2d),
    ("addWeighted", add_weighted),
    ("circle", circle),
    ("polylines", polylines),
    ("cvtColor", cvt_color),
    ("threshold", threshold),
    ("flip", flip),
    ("absdiff", absdiff),
    ("blur", blur),
    ("transpose", transpose),
    ("meanStdDev", mean_std_dev),
    ("equalizeHist", equalize_hist),
    ("rectangle", rectangle),
    ("pyrDown", pyr_down),
    ("findHomography", find_homography),
    ("projectPoints", project_points),
    ("intersectConvexConvex", intersect_convex_convex),
    ("sqrt", sqrt),
    ("integral", integral),
    ("calcBackProject", calc_back_project),
    ("scaleAdd", scale_add),
    ("rotate", rotate),
    ("debug_echo", debug_echo),
    ("debug_nan_at", debug_nan_at),
    ("debug_raise", debug_raise),
    ("debug_hang", |_| Err(MockOutcome::Hang)),
    ("debug_abort", |_| Err(MockOutcome::Abort)),
    ("debug_exit", debug_exit),
];

fn raise(type_name: &str, message: String) -> MockOutcome {
    MockOutcome::Raise {
        type_name: type_name.into(),
        message,
    }
}

fn bad_arg(api: &str, what: &str) -> MockOutcome {
    raise("error", format!("(-5:Bad argument) {what} in function '{api}'"))
}

fn arg<'a>(args: &'a [EncodedValue], i: usize, name: &str) -> Result<&'a EncodedValue, MockOutcome> {
    args.get(i).ok_or_else(|| {
        raise(
            "TypeError",
            format!("missing required argument '{name}' (pos {})", i + 1),
        )
    })
}

fn array<'a>(args: &'a [EncodedValue], i: usize, name: &str) -> Result<&'a NdArray, MockOutcome> {
    match arg(args, i, name)? {
        EncodedValue::NdArray(a) => Ok(a),
        other => Err(raise(
            "TypeError",
            format!("Expected Ptr<cv::UMat> for argument '{name}', got {}", other.kind()),
        )),
    }
}

fn non_empty<'a>(a: &'a NdArray, api: &str) -> Result<&'a NdArray, MockOutcome> {
    if a.is_empty() {
        Err(bad_arg(api, "empty input"))
    } else {
        Ok(a)
    }
}

fn number(args: &[EncodedValue], i: usize, name: &str) -> Result<f64, MockOutcome> {
    let v = arg(args, i, name)?;
    v.as_f64().ok_or_else(|| {
        raise(
            "TypeError",
            format!("Argument '{name}' must be a number, got {}", v.kind()),
        )
    })
}

fn sequence(args: &[EncodedValue], i: usize, name: &str) -> Result<Vec<f64>, MockOutcome> {
    let v = arg(args, i, name)?;
    let err = || {
        raise(
            "TypeError",
            format!("Argument '{name}' must be a sequence of numbers, got {}", v.kind()),
        )
    };
    match v {
        EncodedValue::Seq(items) => items.iter().map(|x| x.as_f64().ok_or_else(err)).collect(),
        EncodedValue::NdArray(a) if a.dtype().is_numeric() => Ok(a.to_f64_vec()),
        _ => Err(err()),
    }
}

fn point(args: &[EncodedValue], i: usize, name: &str, api: &str) -> Result<(f64, f64), MockOutcome> {
    match sequence(args, i, name)?.as_slice() {
        [x, y, ..] => Ok((*x, *y)),
        _ => Err(bad_arg(api, &format!("'{name}' needs two coordinates"))),
    }
}

/// Height, width and elements per pixel.
fn hwc(a: &NdArray) -> (usize, usize, usize) {
    let s = a.shape();
    match s.len() {
        0 => (1, 1, 1),
        1 => (s[0], 1, 1),
        _ => (s[0], s[1], s[2..].iter().product()),
    }
}

fn same_layout(a: &NdArray, b: &NdArray, api: &str) -> Result<(), MockOutcome> {
    if a.shape() != b.shape() || a.dtype() != b.dtype() {
        return Err(raise(
            "error",
            format!("(-209:Sizes of input arguments do not match) The operation is neither 'array op array' nor 'array op scalar' in function '{api}'"),
        ));
    }
    Ok(())
}

fn reject_strings(args: &[EncodedValue]) -> Result<(), MockOutcome> {
    match args.iter().position(|a| matches!(a, EncodedValue::Str(_))) {
        Some(i) => Err(raise(
            "TypeError",
            format!("Argument {} must be numeric, not str", i + 1),
        )),
        None => Ok(()),
    }
}

fn f64_array(shape: Vec<usize>, values: &[f64]) -> EncodedValue {
    EncodedValue::NdArray(NdArray::from_f64(ScalarType::Float64, shape, values).expect("numeric dtype"))
}

fn get_rotation_matrix_2d(args: &[EncodedValue]) -> Out {
    let (cx, cy) = point(args, 0, "center", "getRotationMatrix2D")?;
    let angle = number(args, 1, "angle")?.to_radians();
    let scale = number(args, 2, "scale")?;
    let (a, b) = (scale * angle.cos(), scale * angle.sin());
    Ok(vec![f64_array(
        vec![2, 3],
        &[a, b, (1.0 - a) * cx - b * cy, -b, a, b * cx + (1.0 - a) * cy],
    )])
}

fn add_weighted(args: &[EncodedValue]) -> Out {
    let a = array(args, 0, "src1")?;
    let alpha = number(args, 1, "alpha")?;
    let b = array(args, 2, "src2")?;
    let beta = number(args, 3, "beta")?;
    let gamma = number(args, 4, "gamma")?;
    same_layout(a, b, "addWeighted")?;
    let vals: Vec<f64> = a
        .to_f64_vec()
        .iter()
        .zip(b.to_f64_vec())
        .map(|(x, y)| x * alpha + y * beta + gamma)
        .collect();
    Ok(vec![EncodedValue::NdArray(a.with_values(&vals))])
}

fn draw_image<'a>(args: &'a [EncodedValue], api: &str) -> Result<&'a NdArray, MockOutcome> {
    let img = non_empty(array(args, 0, "img")?, api)?;
    if img.shape().len() < 2 {
        return Err(bad_arg(api, "image must be two-dimensional"));
    }
    Ok(img)
}

fn color(args: &[EncodedValue], i: usize) -> Result<Vec<f64>, MockOutcome> {
    sequence(args, i, "color")
}

fn circle(args: &[EncodedValue]) -> Out {
    let img = draw_image(args, "circle")?;
    let (cx, cy) = point(args, 1, "center", "circle")?;
    let r = number(args, 2, "radius")?;
    let col = color(args, 3)?;
    if r < 0.0 {
        return Err(bad_arg("circle", "radius must be non-negative"));
    }
    let (h, w, c) = hwc(img);
    let mut vals = img.to_f64_vec();
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if dx * dx + dy * dy <= r * r {
                for k in 0..c {
                    vals[(y * w + x) * c + k] = col.get(k).copied().unwrap_or(0.0);
                }
            }
        }
    }
    Ok(vec![EncodedValue::NdArray(img.with_values(&vals))])
}

fn polylines(args: &[EncodedValue]) -> Out {
    let img = draw_image(args, "polylines")?;
    let pts = array(args, 1, "pts")?;
    number(args, 2, "isClosed")?;
    let col = color(args, 3)?;
    let (h, w, c) = hwc(img);
    let mut vals = img.to_f64_vec();
    for xy in pts.to_f64_vec().chunks(2) {
        if let [x, y] = *xy {
            if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                for k in 0..c {
                    vals[((y as usize) * w + x as usize) * c + k] = col.get(k).copied().unwrap_or(0.0);
                }
            }
        }
    }
    Ok(vec![EncodedValue::NdArray(img.with_values(&vals))])
}

fn rectangle(args: &[EncodedValue]) -> Out {
    let img = draw_image(args, "rectangle")?;
    let (x1, y1) = point(args, 1, "pt1", "rectangle")?;
    let (x2, y2) = point(args, 2, "pt2", "rectangle")?;
    let col = color(args, 3)?;
    let (h, w, c) = hwc(img);
    let mut vals = img.to_f64_vec();
    for y in 0..h {
        for x in 0..w {
            let (xf, yf) = (x as f64, y as f64);
            let on_x = (xf == x1.min(x2) || xf == x1.max(x2)) && yf >= y1.min(y2) && yf <= y1.max(y2);
            let on_y = (yf == y1.min(y2) || yf == y1.max(y2)) && xf >= x1.min(x2) && xf <= x1.max(x2);
            if on_x || on_y {
                for k in 0..c {
                    vals[(y * w + x) * c + k] = col.get(k).copied().unwrap_or(0.0);
                }
            }
        }
    }
    Ok(vec![EncodedValue::NdArray(img.with_values(&vals))])
}

fn cvt_color(args: &[EncodedValue]) -> Out {
    let src = non_empty(array(args, 0, "src")?, "cvtColor")?;
    let code = number(args, 1, "code")? as i64;
    let (h, w, c) = hwc(src);
    if c != 3 || src.shape().len() != 3 {
        return Err(raise(
            "error",
            "(-2:Unspecified error) Invalid number of channels in input image: 'scn == 3' in function 'cvtColor'"
                .into(),
        ));
    }
    let vals = src.to_f64_vec();
    match code {
        4 => {
            let swapped: Vec<f64> = vals.chunks(3).flat_map(|p| [p[2], p[1], p[0]]).collect();
            Ok(vec![EncodedValue::NdArray(src.with_values(&swapped))])
        }
        6 => {
            let gray: Vec<f64> = vals
                .chunks(3)
                .map(|p| 0.114 * p[0] + 0.587 * p[1] + 0.299 * p[2])
                .collect();
            let out = NdArray::from_f64(src.dtype(), vec![h, w], &gray).expect("numeric dtype");
            Ok(vec![EncodedValue::NdArray(out)])
        }
        other => Err(bad_arg("cvtColor", &format!("unknown conversion code {other}"))),
    }
}

fn threshold(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    let thresh = number(args, 1, "thresh")?;
    let maxval = number(args, 2, "maxval")?;
    let kind = number(args, 3, "type")? as i64;
    if hwc(src).2 != 1 {
        return Err(bad_arg("threshold", "single-channel input expected"));
    }
    let f: fn(f64, f64, f64) -> f64 = match kind {
        0 => |v, t, m| if v > t { m } else { 0.0 },
        1 => |v, t, m| if v > t { 0.0 } else { m },
        2 => |v, t, _| v.min(t),
        other => return Err(bad_arg("threshold", &format!("unknown threshold type {other}"))),
    };
    let vals: Vec<f64> = src.to_f64_vec().into_iter().map(|v| f(v, thresh, maxval)).collect();
    Ok(vec![
        EncodedValue::Float(thresh),
        EncodedValue::NdArray(src.with_values(&vals)),
    ])
}

fn flip(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    let code = number(args, 1, "flipCode")? as i64;
    let (h, w, c) = hwc(src);
    let vals = src.to_f64_vec();
    let mut out = vec![0.0; vals.len()];
    for y in 0..h {
        for x in 0..w {
            let sy = if code <= 0 { h - 1 - y } else { y };
            let sx = if code != 0 { w - 1 - x } else { x };
            out[(y * w + x) * c..(y * w + x + 1) * c].copy_from_slice(&vals[(sy * w + sx) * c..(sy * w + sx + 1) * c]);
        }
    }
    Ok(vec![EncodedValue::NdArray(src.with_values(&out))])
}

fn absdiff(args: &[EncodedValue]) -> Out {
    let a = array(args, 0, "src1")?;
    let b = array(args, 1, "src2")?;
    same_layout(a, b, "absdiff")?;
    let vals: Vec<f64> = a
        .to_f64_vec()
        .iter()
        .zip(b.to_f64_vec())
        .map(|(x, y)| (x - y).abs())
        .collect();
    Ok(vec![EncodedValue::NdArray(a.with_values(&vals))])
}

fn blur(args: &[EncodedValue]) -> Out {
    let src = non_empty(array(args, 0, "src")?, "blur")?;
    let (kx, ky) = point(args, 1, "ksize", "blur")?;
    if kx < 1.0 || ky < 1.0 {
        return Err(bad_arg("blur", "kernel size must be positive"));
    }
    // horizontal box filter of width kx
    let (h, w, c) = hwc(src);
    let k = (kx as usize).min(w.max(1));
    let vals = src.to_f64_vec();
    let mut out = vec![0.0; vals.len()];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let lo = x.saturating_sub(k / 2);
                let hi = (lo + k).min(w);
                let sum: f64 = (lo..hi).map(|xx| vals[(y * w + xx) * c + ch]).sum();
                out[(y * w + x) * c + ch] = sum / (hi - lo) as f64;
            }
        }
    }
    Ok(vec![EncodedValue::NdArray(src.with_values(&out))])
}

fn transpose_array(src: &NdArray) -> NdArray {
    let (h, w, c) = hwc(src);
    let vals = src.to_f64_vec();
    let mut out = vec![0.0; vals.len()];
    for y in 0..h {
        for x in 0..w {
            out[(x * h + y) * c..(x * h + y + 1) * c].copy_from_slice(&vals[(y * w + x) * c..(y * w + x + 1) * c]);
        }
    }
    let mut shape = src.shape().to_vec();
    if shape.len() >= 2 {
        shape.swap(0, 1);
    }
    NdArray::from_f64(src.dtype(), shape, &out).expect("numeric dtype")
}

fn transpose(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    Ok(vec![EncodedValue::NdArray(transpose_array(src))])
}

fn mean_std_dev(args: &[EncodedValue]) -> Out {
    let src = non_empty(array(args, 0, "src")?, "meanStdDev")?;
    let (h, w, c) = hwc(src);
    let n = (h * w) as f64;
    let vals = src.to_f64_vec();
    let mut mean = vec![0.0; c];
    let mut sq = vec![0.0; c];
    for px in vals.chunks(c) {
        for (k, v) in px.iter().enumerate() {
            mean[k] += v;
            sq[k] += v * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let std: Vec<f64> = sq
        .iter()
        .zip(&mean)
        .map(|(s, m)| (s / n - m * m).max(0.0).sqrt())
        .collect();
    Ok(vec![f64_array(vec![c, 1], &mean), f64_array(vec![c, 1], &std)])
}

fn equalize_hist(args: &[EncodedValue]) -> Out {
    let src = non_empty(array(args, 0, "src")?, "equalizeHist")?;
    if src.dtype() != ScalarType::Uint8 || hwc(src).2 != 1 {
        return Err(bad_arg("equalizeHist", "8-bit single-channel image expected"));
    }
    let vals = src.to_f64_vec();
    let mut hist = [0usize; 256];
    vals.iter().for_each(|v| hist[*v as usize] += 1);
    let mut cdf = [0usize; 256];
    let mut acc = 0;
    for (i, h) in hist.iter().enumerate() {
        acc += h;
        cdf[i] = acc;
    }
    let n = vals.len() as f64;
    let out: Vec<f64> = vals
        .iter()
        .map(|v| (cdf[*v as usize] as f64 / n * 255.0).round())
        .collect();
    Ok(vec![EncodedValue::NdArray(src.with_values(&out))])
}

/// Planted (Size): large inputs overflow a fixed-size row buffer.
fn pyr_down(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    if src.shape().iter().any(|&d| d >= 4096) {
        return Err(MockOutcome::Abort);
    }
    let src = non_empty(src, "pyrDown")?;
    let (h, w, c) = hwc(src);
    let (oh, ow) = (h.div_ceil(2), w.div_ceil(2));
    let vals = src.to_f64_vec();
    let mut out = Vec::with_capacity(oh * ow * c);
    for y in 0..oh {
        for x in 0..ow {
            out.extend_from_slice(&vals[(2 * y * w + 2 * x) * c..(2 * y * w + 2 * x + 1) * c]);
        }
    }
    let mut shape = src.shape().to_vec();
    if shape.len() >= 2 {
        shape[0] = oh;
        shape[1] = ow;
    }
    Ok(vec![EncodedValue::NdArray(
        NdArray::from_f64(src.dtype(), shape, &out).expect("numeric dtype"),
    )])
}

/// Planted (Division): points whose spread falls below the solver's
/// conditioning threshold are normalized by a zero scale.
fn find_homography(args: &[EncodedValue]) -> Out {
    let pts = array(args, 0, "srcPoints")?;
    number(args, 1, "method")?;
    let vals = pts.to_f64_vec();
    if vals.len() != 8 {
        return Err(bad_arg("findHomography", "exactly 4 points expected"));
    }
    let mask = EncodedValue::NdArray(NdArray::from_f64(ScalarType::Uint8, vec![4, 1], &[1.0; 4]).expect("uint8"));
    if vals.iter().all(|v| *v == 0.0) {
        let identity = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        return Ok(vec![f64_array(vec![3, 3], &identity), mask]);
    }
    if vals.iter().all(|v| v.abs() < 1e-2) {
        let scale = 0.0_f64;
        let m = [1.0 / scale, 0.0 / scale, -1.0 / scale, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        return Ok(vec![f64_array(vec![3, 3], &m), mask]);
    }
    let (x0, y0) = (vals[0], vals[1]);
    Ok(vec![
        f64_array(vec![3, 3], &[1.0, 0.0, -x0, 0.0, 1.0, -y0, 0.0, 0.0, 1.0]),
        mask,
    ])
}

/// Planted (Type): all inputs must share one dtype, which the docs never say.
fn project_points(args: &[EncodedValue]) -> Out {
    let obj = array(args, 0, "objectPoints")?;
    let rvec = array(args, 1, "rvec")?;
    let tvec = array(args, 2, "tvec")?;
    if obj.dtype() != rvec.dtype() || obj.dtype() != tvec.dtype() {
        return Err(raise(
            "error",
            "(-205:Formats of input arguments do not match) All the matrices must have the same data type in function 'projectPoints'".into(),
        ));
    }
    let t = tvec.to_f64_vec();
    let (tx, ty) = (t.first().copied().unwrap_or(0.0), t.get(1).copied().unwrap_or(0.0));
    let out: Vec<f64> = obj
        .to_f64_vec()
        .chunks(2)
        .flat_map(|xy| [xy[0] + tx, xy.get(1).copied().unwrap_or(0.0) + ty])
        .collect();
    let n = out.len() / 2;
    Ok(vec![f64_array(vec![n, 1, 2], &out)])
}

/// Planted (Type): a string argument is dereferenced as a point buffer.
fn intersect_convex_convex(args: &[EncodedValue]) -> Out {
    if args.iter().any(|a| matches!(a, EncodedValue::Str(_))) {
        return Err(MockOutcome::Abort);
    }
    let a = array(args, 0, "pts1")?;
    let b = array(args, 1, "pts2")?;
    let bbox = |p: &NdArray| {
        let v = p.to_f64_vec();
        let range = |start: usize| {
            v.iter()
                .skip(start)
                .step_by(2)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(*x), hi.max(*x))
                })
        };
        (range(0), range(1))
    };
    let ((ax0, ax1), (ay0, ay1)) = bbox(a);
    let ((bx0, bx1), (by0, by1)) = bbox(b);
    let w = (ax1.min(bx1) - ax0.max(bx0)).max(0.0);
    let h = (ay1.min(by1) - ay0.max(by0)).max(0.0);
    let area = if w.is_finite() && h.is_finite() { w * h } else { 0.0 };
    let empty = NdArray::zeros(ScalarType::Float32, vec![0, 1, 2]).expect("float32");
    Ok(vec![EncodedValue::Float(area), EncodedValue::NdArray(empty)])
}

/// Planted (Noise): no domain check before the square root.
fn sqrt(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    if !src.dtype().is_float() {
        return Err(bad_arg("sqrt", "floating-point input expected"));
    }
    let vals: Vec<f64> = src.to_f64_vec().into_iter().map(f64::sqrt).collect();
    Ok(vec![EncodedValue::NdArray(src.with_values(&vals))])
}

/// Planted (Mask): a lookup table sized for values below 64.
fn integral(args: &[EncodedValue]) -> Out {
    let src = array(args, 0, "src")?;
    let vals = src.to_f64_vec();
    if vals.iter().any(|v| *v >= 64.0) {
        return Err(raise(
            "error",
            "(-215:Assertion failed) (unsigned)v < LUT_SIZE in function 'integral'".into(),
        ));
    }
    let (h, w, c) = hwc(src);
    let mut out = vec![0.0; (h + 1) * (w + 1) * c];
    for y in 0..h {
        for x in 0..w {
            for k in 0..c {
                let v = vals[(y * w + x) * c + k];
                let at = |yy: usize, xx: usize| (yy * (w + 1) + xx) * c + k;
                out[at(y + 1, x + 1)] = v + out[at(y, x + 1)] + out[at(y + 1, x)] - out[at(y, x)];
            }
        }
    }
    Ok(vec![f64_array(vec![h + 1, w + 1, c], &out)])
}

fn calc_back_project(args: &[EncodedValue]) -> Out {
    reject_strings(args)?;
    let (h, w) = match args.first() {
        Some(EncodedValue::NdArray(a)) => {
            let (h, w, _) = hwc(a);
            (h, w)
        }
        _ => (1, 1),
    };
    Ok(vec![EncodedValue::NdArray(
        NdArray::zeros(ScalarType::Uint8, vec![h, w]).expect("uint8"),
    )])
}

fn scale_add(args: &[EncodedValue]) -> Out {
    reject_strings(args)?;
    let alpha = args.get(1).and_then(EncodedValue::as_f64).unwrap_or(1.0);
    match (args.first(), args.get(2)) {
        (Some(EncodedValue::NdArray(a)), Some(EncodedValue::NdArray(b)))
            if a.shape() == b.shape() && a.dtype() == b.dtype() =>
        {
            let vals: Vec<f64> = a
                .to_f64_vec()
                .iter()
                .zip(b.to_f64_vec())
                .map(|(x, y)| x * alpha + y)
                .collect();
            Ok(vec![EncodedValue::NdArray(a.with_values(&vals))])
        }
        (Some(first), _) => Ok(vec![first.clone()]),
        (None, _) => Ok(vec![EncodedValue::Null]),
    }
}

fn rotate(args: &[EncodedValue]) -> Out {
    reject_strings(args)?;
    match args.first() {
        Some(EncodedValue::NdArray(a)) => Ok(vec![EncodedValue::NdArray(transpose_array(a))]),
        Some(other) => Ok(vec![other.clone()]),
        None => Ok(vec![EncodedValue::Null]),
    }
}

fn debug_echo(args: &[EncodedValue]) -> Out {
    Ok(args.to_vec())
}

fn debug_nan_at(args: &[EncodedValue]) -> Out {
    let i = number(args, 0, "index")? as usize;
    Ok((0..3.max(i + 1))
        .map(|k| EncodedValue::Float(if k == i { f64::NAN } else { k as f64 }))
        .collect())
}

/// Raises a fixed message whose embedded address and counter vary with the input.
fn debug_raise(args: &[EncodedValue]) -> Out {
    let seed: f64 = args.iter().filter_map(EncodedValue::as_f64).sum();
    let addr = 0x7f00_0000_0000_u64 + (seed.abs() * 4096.0) as u64;
    Err(raise(
        "error",
        format!(
            "(-2:Unspecified error) fixed failure at 0x{addr:x} (frame {}) in function 'debug_raise'",
            seed as i64
        ),
    ))
}

fn debug_exit(args: &[EncodedValue]) -> Out {
    Err(MockOutcome::Exit(number(args, 0, "code")? as i32))
}
