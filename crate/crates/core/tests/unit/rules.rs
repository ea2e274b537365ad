use docfuzz_core::enrichment::rules::*;
use docfuzz_core::schema::*;
use docfuzz_core::value::*;

fn infer(name: &str, text: &str) -> ParamInfo {
    infer_param(name, text, &[])
}

#[test]
fn normalization() {
    assert_eq!(normalize_param_name("image1"), "image");
    assert_eq!(normalize_param_name("Image22"), "image");
    assert_eq!(normalize_param_name("pt1x"), "pt1x");
}

#[test]
fn type_order_and_float64_precedence() {
    assert_eq!(detect_types("uint8 or float"), [ScalarType::Uint8, ScalarType::Float32]);
    assert_eq!(
        detect_types("float32 or float64"),
        [ScalarType::Float32, ScalarType::Float64]
    );
    assert_eq!(detect_types("double precision"), [ScalarType::Float64]);
    assert_eq!(detect_types("a pair of integers"), [ScalarType::Int32]);
    assert!(detect_types("Isotropic scale factor.").is_empty());
}

#[test]
fn three_channel_array_uint8_or_float() {
    let p = infer(
        "image1",
        "First input image, typically a three-channel array, uint8 or float.",
    );
    assert_eq!(p.type_domain.as_slice(), [ScalarType::Uint8, ScalarType::Float32]);
    assert_eq!(p.size_spec, Some(SizeSpec::rgb()));
    assert!(p.flag);
}

#[test]
fn grayscale_image() {
    let p = infer("src", "Source 8-bit single-channel image.");
    assert_eq!(p.size_spec, Some(SizeSpec::image([1])));
    assert_eq!(p.type_domain.as_slice(), [ScalarType::Uint8]);
}

#[test]
fn color_rule() {
    let p = infer("color", "Circle color.");
    assert_eq!(p.size_spec, Some(SizeSpec::new(vec![DimSpec::Fixed(3)])));
    assert_eq!(p.description.value_range, Some(ValueRange::new(0.0, 256.0)));
    assert_eq!(p.type_domain.as_slice(), [ScalarType::Uint8]);
}

#[test]
fn options_make_param_unmodifiable() {
    let p = infer("flipCode", "how to flip the array, one of 0, 1, -1.");
    assert!(!p.flag);
    assert_eq!(
        p.description.options,
        Some(vec![EncodedValue::Int(0), EncodedValue::Int(1), EncodedValue::Int(-1)])
    );
    assert_eq!(p.size_spec, None);
    let p = infer(
        "type",
        "thresholding type, one of THRESH_BINARY=0, THRESH_TRUNC=2. Default is THRESH_TRUNC",
    );
    assert_eq!(p.type_domain.as_slice(), [ScalarType::Enum]);
    assert_eq!(
        p.default,
        Some(EncodedValue::Enum {
            name: "THRESH_TRUNC".into(),
            value: 2
        })
    );
}

#[test]
fn points_bounded_by_first_image() {
    let img = infer("img", "Image, uint8.");
    let p = infer_param("pts", "Array of polygonal curve points, int32.", &[img]);
    assert_eq!(
        p.size_spec,
        Some(SizeSpec::new(vec![
            DimSpec::Var(DimSymbol::N),
            DimSpec::Fixed(1),
            DimSpec::Fixed(2)
        ]))
    );
    assert_eq!(
        p.description.depends_on,
        [DependencyEdge::new(
            "img",
            DependencyKind::BoundedByShape { axes: [1, 0] }
        )]
    );
    let q = infer(
        "srcPoints",
        "Coordinates of 4 points in the original plane, double precision.",
    );
    assert_eq!(q.size_spec.unwrap().dims[0], DimSpec::Fixed(4));
    assert_eq!(q.type_domain.as_slice(), [ScalarType::Float64]);
}

#[test]
fn single_point_and_pair() {
    let p = infer("center", "Center of the rotation in the source image.");
    assert_eq!(p.size_spec, Some(SizeSpec::new(vec![DimSpec::Fixed(2)])));
    assert!(p.type_domain.is_empty());
    let k = infer("ksize", "blurring kernel size, a pair of integers between 1 and 8.");
    assert_eq!(k.size_spec, Some(SizeSpec::new(vec![DimSpec::Fixed(2)])));
    assert_eq!(k.description.value_range, Some(ValueRange::new(1.0, 9.0)));
    assert!(k.description.depends_on.is_empty());
}

#[test]
fn explicit_dims() {
    let p = infer("rvec", "Rotation vector, 3x1, float32 or float64.");
    assert_eq!(
        p.size_spec,
        Some(SizeSpec::new(vec![DimSpec::Fixed(3), DimSpec::Fixed(1)]))
    );
}

#[test]
fn ranges() {
    assert_eq!(
        infer("r", "an integer between 0 and 100").description.value_range,
        Some(ValueRange::new(0.0, 101.0))
    );
    assert_eq!(
        infer("t", "threshold value, between 0 and 255.")
            .description
            .value_range,
        Some(ValueRange::new(0.0, 255.0))
    );
    assert_eq!(
        infer("v", "values in [0, 1)").description.value_range,
        Some(ValueRange::new(0.0, 1.0))
    );
    assert_eq!(
        infer("v", "valid ranges of 0 to 256").description.value_range,
        Some(ValueRange::new(0.0, 256.0))
    );
    assert_eq!(infer("v", "from 5 to 5").description.value_range, None);
}

#[test]
fn dependencies_copy_from_source() {
    let src1 = infer("src1", "first input array, uint8 or float32.");
    let src2 = infer_param(
        "src2",
        "second input array of the same size and type as src1.",
        &[src1.clone()],
    );
    assert_eq!(src2.type_domain, src1.type_domain);
    assert_eq!(src2.size_spec, src1.size_spec);
    assert_eq!(
        src2.description.depends_on,
        [
            DependencyEdge::new("src1", DependencyKind::SameType),
            DependencyEdge::new("src1", DependencyKind::SameShape)
        ]
    );
    let dst = infer_param("dst", "output array of the same type as src1.", &[src1.clone()]);
    assert_eq!(
        dst.description.depends_on,
        [DependencyEdge::new("src1", DependencyKind::SameType)]
    );
    let mask = infer_param("mask", "same size as src1, grayscale.", &[src1.clone()]);
    assert_eq!(mask.size_spec, Some(SizeSpec::image([1])));
    let late = infer("a", "the same type as b.");
    assert!(late.description.depends_on.is_empty());
    let bare = infer_param("img2", "treated as src1.", &[src1]);
    assert_eq!(
        bare.description.depends_on,
        [DependencyEdge::new("src1", DependencyKind::SameType)]
    );
}

#[test]
fn defaults() {
    assert_eq!(
        infer("k", "kernel size, int. Default value is 3.").default,
        Some(EncodedValue::Int(3))
    );
    assert_eq!(
        infer("s", "scale, float. Default is 1").default,
        Some(EncodedValue::Float(1.0))
    );
}

#[test]
fn empty_text_is_unconstrained() {
    assert_eq!(infer("x", ""), ParamInfo::unconstrained("x", ""));
}
