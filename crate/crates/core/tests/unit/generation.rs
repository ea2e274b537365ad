use docfuzz_core::constraint_engine::*;
use docfuzz_core::constraint_engine::{check_case, extract_constraints};
use docfuzz_core::generation::*;
use docfuzz_core::schema::*;
use docfuzz_core::schema::{
    DependencyEdge, DescriptionSpec, DimSymbol, ParamInfo, Provenance, SizeSpec, StandardizedApiInfo, TypeDomain,
    ValueRange,
};
use docfuzz_core::value::*;

fn cs(params: Vec<ParamInfo>) -> ApiConstraintSet {
    extract_constraints(&StandardizedApiInfo {
        api_name: "t".into(),
        params,
        output_count: 1,
        provenance: Provenance::Parsed,
    })
    .unwrap()
}

fn image(name: &str, h: usize, w: usize) -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8]),
        size_spec: Some(SizeSpec::new(vec![
            DimSpec::Fixed(h),
            DimSpec::Fixed(w),
            DimSpec::Fixed(3),
        ])),
        ..ParamInfo::unconstrained(name, "")
    }
}

fn color() -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8]),
        size_spec: Some(SizeSpec::new(vec![DimSpec::Fixed(3)])),
        description: DescriptionSpec {
            raw_text: "color".into(),
            value_range: Some(ValueRange::new(0.0, 256.0)),
            ..Default::default()
        },
        ..ParamInfo::unconstrained("color", "")
    }
}

#[test]
fn color_is_three_ints() {
    let set = cs(vec![color()]);
    for seed in 0..20 {
        let c = init_case(
            &set,
            &GenConfig {
                rng_seed: seed,
                ..GenConfig::default()
            },
        );
        let EncodedValue::Seq(items) = &c.args["color"] else {
            panic!("{:?}", c.args["color"])
        };
        assert_eq!(items.len(), 3);
        assert!(items
            .iter()
            .all(|i| matches!(i, EncodedValue::Int(v) if (0..256).contains(v))));
    }
}

#[test]
fn singleton_choice() {
    let mut p = ParamInfo::unconstrained("mode", "");
    p.flag = false;
    let a = EncodedValue::Enum {
        name: "A".into(),
        value: 0,
    };
    p.description.options = Some(vec![a.clone()]);
    let set = cs(vec![p]);
    let cfg = GenConfig::default();
    let mut c = init_case(&set, &cfg);
    for i in 1..50 {
        assert_eq!(c.args["mode"], a);
        c = next_case(&set, &c, &cfg, i);
    }
}

#[test]
fn points_inside_32_by_48_image() {
    let pts = ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Int32]),
        size_spec: Some(SizeSpec::new(vec![
            DimSpec::Var(DimSymbol::N),
            DimSpec::Fixed(1),
            DimSpec::Fixed(2),
        ])),
        description: DescriptionSpec {
            depends_on: vec![DependencyEdge::new(
                "img",
                DependencyKind::BoundedByShape { axes: [1, 0] },
            )],
            ..Default::default()
        },
        ..ParamInfo::unconstrained("pts", "")
    };
    let set = cs(vec![image("img", 32, 48), pts]);
    for seed in 0..100 {
        let c = init_case(
            &set,
            &GenConfig {
                rng_seed: seed,
                ..GenConfig::default()
            },
        );
        let a = c.args["pts"].as_array().unwrap();
        for xy in a.to_f64_vec().chunks(2) {
            assert!((0.0..48.0).contains(&xy[0]) && (0.0..32.0).contains(&xy[1]), "{xy:?}");
        }
    }
}

#[test]
fn division_only_flags() {
    let set = cs(vec![image("img", 4, 4), color()]);
    let cfg = GenConfig {
        strategy_flags: StrategyFlags {
            type_: false,
            size: false,
            value_noise: false,
            value_mask: false,
            value_division: true,
        },
        ..GenConfig::default()
    };
    let mut c = init_case(&set, &cfg);
    for i in 1..100 {
        c = next_case(&set, &c, &cfg, i);
        assert_eq!(c.applied.value_strategy, Some(ValueStrategy::Division));
        assert_eq!(c.validity_mode, ValidityMode::ValidOnly);
    }
}

#[test]
fn all_flags_off_uses_init_path() {
    let set = cs(vec![image("img", 4, 4), color()]);
    let cfg = GenConfig {
        strategy_flags: StrategyFlags::none(),
        ..GenConfig::default()
    };
    let c0 = init_case(&set, &cfg);
    let c1 = next_case(&set, &c0, &cfg, 1);
    assert_eq!(c1.applied, AppliedStrategies::default());
    assert_eq!(c1, init_case_at(&set, &cfg, 1));
}

#[test]
fn fit_respects_float32_rounding() {
    let v = fit(254.999_999_9, ScalarType::Float32, 0.0, 255.0);
    assert!(v < 255.0);
    assert_eq!(v, f64::from(v as f32));
    assert_eq!(fit(300.0, ScalarType::Uint8, 0.0, 256.0), 255.0);
    assert_eq!(fit(-1.0, ScalarType::Int32, 0.0, 10.0), 0.0);
}

#[test]
fn valid_cases_check_clean() {
    let src = ParamInfo {
        type_domain: TypeDomain::new([ScalarType::Uint8, ScalarType::Float32]),
        size_spec: Some(SizeSpec::rgb()),
        ..ParamInfo::unconstrained("src1", "")
    };
    let mut src2 = src.clone();
    src2.name = "src2".into();
    src2.description.depends_on = vec![
        DependencyEdge::new("src1", DependencyKind::SameType),
        DependencyEdge::new("src1", DependencyKind::SameShape),
    ];
    let set = cs(vec![src, src2, color()]);
    let cfg = GenConfig {
        rng_seed: 3,
        ..GenConfig::default()
    };
    let mut c = init_case(&set, &cfg);
    let mut valid = 0;
    for i in 1..300 {
        c = next_case(&set, &c, &cfg, i);
        if c.validity_mode == ValidityMode::ValidOnly {
            valid += 1;
            assert_eq!(check_case(&set, &c), vec![], "case {i}");
        }
    }
    assert!(valid > 150);
}
