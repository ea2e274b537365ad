use docfuzz_core::generation::rng::stream;
use docfuzz_core::generation::strategies::*;
use docfuzz_core::generation::*;
use docfuzz_core::value::ScalarType;
use docfuzz_core::value::*;

#[test]
fn full_mask_zeroes_everything() {
    let v = NdArray::from_f64(ScalarType::Float32, vec![3, 4, 2], &[1.5; 24]).unwrap();
    let out = apply_mask(&v, &MaskRect::full(v.shape()), 0.0);
    assert_eq!(out, NdArray::zeros(ScalarType::Float32, vec![3, 4, 2]).unwrap());
}

#[test]
fn partial_mask_touches_only_rect() {
    let v = NdArray::zeros(ScalarType::Uint8, vec![3, 3, 1]).unwrap();
    let out = apply_mask(&v, &MaskRect { rows: 1..2, cols: 0..2 }, 9.0);
    assert_eq!(out.to_f64_vec(), [0., 0., 0., 9., 9., 0., 0., 0., 0.]);
}

#[test]
fn uint8_floor_division() {
    let v = NdArray::from_f64(ScalarType::Uint8, vec![3], &[4., 8., 16.]).unwrap();
    assert_eq!(apply_division(&v, 4).to_f64_vec(), [1., 2., 4.]);
    let w = NdArray::from_f64(ScalarType::Int32, vec![2], &[-7., 7.]).unwrap();
    assert_eq!(apply_division(&w, 2).to_f64_vec(), [-4., 3.]);
    let f = NdArray::from_f64(ScalarType::Float64, vec![1], &[1.0]).unwrap();
    assert_eq!(apply_division(&f, 8).to_f64_vec(), [0.125]);
}

#[test]
fn noise_mean_absolute_deviation() {
    let n = 10_000;
    let sigma = 0.5;
    let v = NdArray::zeros(ScalarType::Float64, vec![n]).unwrap();
    let out = apply_noise(&v, sigma, &mut stream(7, "noise", 0, "v"));
    let mad = out.to_f64_vec().iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    // E|N(0, s)| = s * sqrt(2 / pi)
    let expected = sigma * (2.0 / std::f64::consts::PI).sqrt();
    assert!(
        (mad - expected).abs() < 3.0 * sigma / (n as f64).sqrt(),
        "{mad} vs {expected}"
    );
}

#[test]
fn strategies_preserve_shape_and_dtype() {
    let cfg = GenConfig::default();
    let v = NdArray::from_f64(ScalarType::Uint8, vec![5, 6, 3], &[200.0; 90]).unwrap();
    for s in ValueStrategy::ALL {
        let out = apply_value_strategy(&v, s, &cfg, &mut stream(1, "s", 0, "v"));
        assert_eq!(out.shape(), v.shape());
        assert_eq!(out.dtype(), v.dtype());
        assert!(out.to_f64_vec().iter().all(|x| (0.0..=255.0).contains(x)));
    }
}
