use docfuzz_core::doc_parser::ParamDescription;
use docfuzz_core::schema::*;
use docfuzz_core::value::*;

fn image(name: &str, text: &str) -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8, ScalarType::Float32]),
        size_spec: Some(SizeSpec::rgb()),
        ..ParamInfo::unconstrained(name, text)
    }
}

/// The image1 / image2 / points / color example, hand-encoded.
fn figure_info() -> StandardizedApiInfo {
    let mut image2 = image("image2", "Second input image of the same size and type as image1.");
    image2.description.depends_on = vec![
        DependencyEdge::new("image1", DependencyKind::SameType),
        DependencyEdge::new("image1", DependencyKind::SameShape),
    ];
    let points = ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Int32]),
        size_spec: Some(SizeSpec::new(vec![
            DimSpec::Var(DimSymbol::N),
            DimSpec::Fixed(1),
            DimSpec::Fixed(2),
        ])),
        description: DescriptionSpec {
            raw_text: "Array of points.".into(),
            depends_on: vec![DependencyEdge::new(
                "image1",
                DependencyKind::BoundedByShape { axes: [1, 0] },
            )],
            ..Default::default()
        },
        ..ParamInfo::unconstrained("points", "")
    };
    let color = ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8]),
        size_spec: Some(SizeSpec::new(vec![DimSpec::Fixed(3)])),
        description: DescriptionSpec {
            raw_text: "Color.".into(),
            value_range: Some(ValueRange::new(0.0, 256.0)),
            ..Default::default()
        },
        ..ParamInfo::unconstrained("color", "")
    };
    StandardizedApiInfo {
        api_name: "cv2.example".into(),
        params: vec![image("image1", "First input image."), image2, points, color],
        output_count: 1,
        provenance: Provenance::Parsed,
    }
}

fn rules(info: &StandardizedApiInfo) -> Vec<&'static str> {
    validate(info).iter().map(|v| v.rule.id()).collect()
}

#[test]
fn figure_info_is_valid() {
    assert_eq!(validate(&figure_info()), vec![]);
}

#[test]
fn forward_dependency_reported() {
    let mut info = figure_info();
    info.params.swap(0, 1);
    assert!(rules(&info).contains(&"forward dependency"));
}

#[test]
fn unmodifiable_needs_domain() {
    let mut info = figure_info();
    info.params[3].flag = false;
    assert_eq!(rules(&info), ["unmodifiable without domain"]);
    info.params[3].default = Some(EncodedValue::Int(0));
    assert!(validate(&info).is_empty());
}

#[test]
fn other_rules() {
    let mut info = figure_info();
    info.params[1].type_domain = TypeDomain::new([ScalarType::Float64]);
    info.params[3].description.value_range = Some(ValueRange::new(5.0, 5.0));
    info.params[3].description.options = Some(vec![]);
    info.params[0].size_spec = Some(SizeSpec::new(vec![DimSpec::Fixed(0), DimSpec::ChannelSet([5].into())]));
    let got = rules(&info);
    for want in [
        "same-type domain mismatch",
        "empty value range",
        "empty options",
        "zero dimension",
        "invalid channel set",
        "same-shape rank mismatch",
    ] {
        assert!(got.contains(&want), "{want} missing from {got:?}");
    }
}

#[test]
fn duplicates_and_identifiers() {
    let mut info = figure_info();
    info.params[3].name = "image1".into();
    info.params[2].name = "2pts".into();
    info.params[0].type_domain = TypeDomain::from_vec_unchecked(vec![ScalarType::Uint8, ScalarType::Uint8]);
    let got = rules(&info);
    assert!(got.contains(&"duplicate param"));
    assert!(got.contains(&"invalid identifier"));
    assert!(got.contains(&"duplicate type"));
}

#[test]
fn round_trip() {
    let info = figure_info();
    assert_eq!(from_json(&to_json(&info)).unwrap(), info);
}

#[test]
fn wire_shape_of_dims_and_edges() {
    let v = serde_json::to_value(&figure_info()).unwrap();
    let pts = &v["params"][2];
    assert_eq!(
        pts["size_spec"]["dims"],
        serde_json::json!([{"var": "N"}, {"fixed": 1}, {"fixed": 2}])
    );
    assert_eq!(
        pts["description"]["depends_on"][0],
        serde_json::json!({"source": "image1", "kind": {"bounded_by_shape": {"axes": [1, 0]}}})
    );
    assert_eq!(v["params"][1]["description"]["depends_on"][0]["kind"], "same_type");
    assert_eq!(
        v["params"][0]["size_spec"]["dims"][2],
        serde_json::json!({"channel_set": [3]})
    );
}

#[test]
fn missing_flag_points_at_field() {
    let text = r#"{"api_name":"f","params":[{"name":"a"}],"output_count":0,"provenance":"parsed"}"#;
    let err = from_json(text).unwrap_err();
    assert_eq!(err.pointer, "/params/0/flag");
}

#[test]
fn unknown_key_rejected() {
    let text = r#"{"api_name":"f","params":[],"output_count":0,"provenance":"parsed","extra":1}"#;
    let err = from_json(text).unwrap_err();
    assert_eq!(err.pointer, "/extra");
}

#[test]
fn duplicate_type_rejected_on_decode() {
    let text = r#"{"api_name":"f","params":[{"name":"a","flag":true,"type_domain":["float32","float32"]}],
        "output_count":0,"provenance":"parsed"}"#;
    let err = from_json(text).unwrap_err();
    assert_eq!(err.pointer, "/params/0/type_domain");
    assert!(err.message.contains("duplicate"), "{}", err.message);
}

#[test]
fn described_params_checked() {
    let info = figure_info();
    let descs = vec![
        ParamDescription {
            name: "image1".into(),
            text: String::new(),
        },
        ParamDescription {
            name: "mask".into(),
            text: String::new(),
        },
    ];
    let v = check_described_params(&info, &descs);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].param.as_deref(), Some("mask"));
}
