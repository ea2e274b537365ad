use docfuzz_core::constraint_engine::*;
use docfuzz_core::generation::*;
use docfuzz_core::generation::{AppliedStrategies, ValidityMode};
use docfuzz_core::schema::*;
use docfuzz_core::schema::{DescriptionSpec, ParamInfo, Provenance};
use docfuzz_core::value::NdArray;
use docfuzz_core::value::*;

fn info(params: Vec<ParamInfo>) -> StandardizedApiInfo {
    StandardizedApiInfo {
        api_name: "t".into(),
        params,
        output_count: 1,
        provenance: Provenance::Parsed,
    }
}

fn image(name: &str, deps: Vec<DependencyEdge>) -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8, ScalarType::Float32]),
        size_spec: Some(SizeSpec::rgb()),
        description: DescriptionSpec {
            raw_text: String::new(),
            depends_on: deps,
            ..Default::default()
        },
        ..ParamInfo::unconstrained(name, "")
    }
}

fn pair() -> StandardizedApiInfo {
    info(vec![
        image("image1", vec![]),
        image(
            "image2",
            vec![
                DependencyEdge::new("image1", DependencyKind::SameType),
                DependencyEdge::new("image1", DependencyKind::SameShape),
            ],
        ),
    ])
}

fn case(args: Vec<(&str, EncodedValue)>) -> TestCase {
    TestCase {
        api_name: "t".into(),
        case_index: 0,
        seed: 0,
        args: args.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        applied: AppliedStrategies::default(),
        validity_mode: ValidityMode::ValidOnly,
    }
}

fn arr(t: ScalarType, shape: &[usize]) -> EncodedValue {
    EncodedValue::NdArray(NdArray::zeros(t, shape.to_vec()).unwrap())
}

#[test]
fn image_pair_order_and_count() {
    let cs = extract_constraints(&pair()).unwrap();
    assert_eq!(cs.order, ["image1", "image2"]);
    // each image: type + 3 dims; image2 adds two dependencies
    assert_eq!(cs.constraint_count, 4 + 4 + 2);
}

#[test]
fn lone_scalar() {
    let cs = extract_constraints(&info(vec![ParamInfo::unconstrained("p", "")])).unwrap();
    assert_eq!(cs.order, ["p"]);
    assert_eq!(cs.specs["p"].type_domain.as_slice(), [ScalarType::Float32]);
    assert_eq!(cs.specs["p"].size_template, SizeTemplate::Scalar);
    assert_eq!(cs.constraint_count, 1);
}

#[test]
fn cycle_detected() {
    let mut a = ParamInfo::unconstrained("a", "");
    a.description.depends_on = vec![DependencyEdge::new("b", DependencyKind::SameType)];
    let mut b = ParamInfo::unconstrained("b", "");
    b.description.depends_on = vec![DependencyEdge::new("a", DependencyKind::SameType)];
    match extract_constraints(&info(vec![a, b])) {
        Err(ConstraintError::CyclicDependency { cycle }) => {
            assert_eq!(cycle.first(), cycle.last());
            assert!(cycle.contains(&"a".to_string()) && cycle.contains(&"b".to_string()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn ordering_respects_forward_edges() {
    // declared dependent-first: the sort must still put the source first
    let mut a = ParamInfo::unconstrained("a", "");
    a.description.depends_on = vec![DependencyEdge::new("b", DependencyKind::SameType)];
    let cs = extract_constraints(&info(vec![
        a,
        ParamInfo::unconstrained("b", ""),
        ParamInfo::unconstrained("c", ""),
    ]))
    .unwrap();
    assert_eq!(cs.order, ["b", "a", "c"]);
    assert_eq!(cs.specs.keys().collect::<Vec<_>>(), ["a", "b", "c"]);
}

#[test]
fn fixed_choices_include_default() {
    let mut p = ParamInfo::unconstrained("flags", "");
    p.flag = false;
    p.description.options = Some(vec![EncodedValue::Int(0), EncodedValue::Int(1)]);
    p.default = Some(EncodedValue::Int(4));
    let cs = extract_constraints(&info(vec![p])).unwrap();
    let spec = &cs.specs["flags"];
    assert!(!spec.modifiable);
    assert_eq!(spec.fixed_choices.as_ref().unwrap().len(), 3);
    assert_eq!(spec.type_domain.as_slice(), [ScalarType::Int32]);
}

#[test]
fn array_keyword_defaults_to_rgb() {
    let cs = extract_constraints(&info(vec![ParamInfo::unconstrained("src", "")])).unwrap();
    assert_eq!(cs.specs["src"].size_template, SizeTemplate::Shaped(SizeSpec::rgb()));
}

#[test]
fn same_type_violation_message() {
    let cs = extract_constraints(&pair()).unwrap();
    let c = case(vec![
        ("image1", arr(ScalarType::Uint8, &[4, 4, 3])),
        ("image2", arr(ScalarType::Float64, &[4, 4, 3])),
    ]);
    let msgs: Vec<String> = check_case(&cs, &c).iter().map(ToString::to_string).collect();
    assert!(msgs.contains(&"image2: SameType(image1)".to_string()), "{msgs:?}");
    let ok = case(vec![
        ("image1", arr(ScalarType::Uint8, &[4, 4, 3])),
        ("image2", arr(ScalarType::Uint8, &[4, 4, 3])),
    ]);
    assert!(check_case(&cs, &ok).is_empty());
    let bad_shape = case(vec![
        ("image1", arr(ScalarType::Uint8, &[4, 4, 3])),
        ("image2", arr(ScalarType::Uint8, &[4, 5, 3])),
    ]);
    let v = check_case(&cs, &bad_shape);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].rule, ViolationRule::SameShape("image1".into()));
}

#[test]
fn point_outside_image() {
    let pt = ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Int32]),
        size_spec: Some(SizeSpec::new(vec![DimSpec::Fixed(2)])),
        description: DescriptionSpec {
            depends_on: vec![DependencyEdge::new(
                "img",
                DependencyKind::BoundedByShape { axes: [1, 0] },
            )],
            ..Default::default()
        },
        ..ParamInfo::unconstrained("pt", "")
    };
    let cs = extract_constraints(&info(vec![image("img", vec![]), pt])).unwrap();
    let seq = |x, y| EncodedValue::Seq(vec![EncodedValue::Int(x), EncodedValue::Int(y)]);
    let bad = case(vec![("img", arr(ScalarType::Uint8, &[64, 64, 3])), ("pt", seq(70, 10))]);
    assert_eq!(
        check_case(&cs, &bad),
        [Violation {
            param: "pt".into(),
            rule: ViolationRule::BoundedByShape("img".into())
        }]
    );
    let good = case(vec![("img", arr(ScalarType::Uint8, &[64, 64, 3])), ("pt", seq(63, 0))]);
    assert!(check_case(&cs, &good).is_empty());
}

#[test]
fn missing_and_unexpected() {
    let cs = extract_constraints(&pair()).unwrap();
    let c = case(vec![
        ("image1", arr(ScalarType::Uint8, &[4, 4, 3])),
        ("zzz", EncodedValue::Null),
    ]);
    let rules: Vec<_> = check_case(&cs, &c).into_iter().map(|v| v.rule).collect();
    assert!(rules.contains(&ViolationRule::MissingArg));
    assert!(rules.contains(&ViolationRule::UnexpectedArg));
}

#[test]
fn var_dims_limited() {
    let cs = extract_constraints(&pair()).unwrap();
    let c = case(vec![
        ("image1", arr(ScalarType::Uint8, &[0, 4, 3])),
        ("image2", arr(ScalarType::Uint8, &[0, 4, 3])),
    ]);
    assert!(check_case(&cs, &c)
        .iter()
        .any(|v| matches!(v.rule, ViolationRule::Size { .. })));
}
