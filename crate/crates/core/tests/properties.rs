use std::sync::LazyLock;

use docfuzz_core::constraint_engine::ApiConstraintSet;
use docfuzz_core::doc_parser::{
    classify_doc, parse_doc, parse_param_descriptions, parse_signature, DocClass, RawApiDoc,
};
use docfuzz_core::generation::{case_stream, GenConfig, StrategyFlags, TypeStrategy, ValueStrategy};
use docfuzz_core::orchestrator::oracle::classify_outcome;
use docfuzz_core::orchestrator::{dedup_signature, ExecutionResult, Outcome, Verdict};
use docfuzz_core::par::Parallelism;
use docfuzz_core::pipeline::{bundled_mock_constraints, parse_corpus};
use docfuzz_core::schema::{
    self, DependencyEdge, DependencyKind, DescriptionSpec, DimSpec, DimSymbol, ParamInfo, Provenance, SizeSpec,
    StandardizedApiInfo, TypeDomain, ValueRange,
};
use docfuzz_core::value::round_half_away;
use docfuzz_core::{check_case, EncodedValue, ScalarType, ValidityMode};
use proptest::prelude::*;

static MOCK: LazyLock<Vec<ApiConstraintSet>> = LazyLock::new(|| bundled_mock_constraints(Parallelism::Parallel));

const TYPES: [ScalarType; 7] = [
    ScalarType::Uint8,
    ScalarType::Int32,
    ScalarType::Float32,
    ScalarType::Float64,
    ScalarType::Bool,
    ScalarType::String,
    ScalarType::Enum,
];

fn ident() -> impl Strategy<Value = String> {
    "[a-z_][a-zA-Z0-9_]{0,8}"
}

fn scalar_type() -> impl Strategy<Value = ScalarType> {
    prop::sample::select(TYPES.to_vec())
}

fn dim() -> impl Strategy<Value = DimSpec> {
    prop_oneof![
        (1usize..8).prop_map(DimSpec::Fixed),
        prop::sample::select(vec![DimSymbol::H, DimSymbol::W, DimSymbol::N]).prop_map(DimSpec::Var),
        prop::collection::btree_set(1u8..5, 1..4).prop_map(DimSpec::ChannelSet),
        (ident(), 0usize..3).prop_map(|(param, axis)| DimSpec::Ref { param, axis }),
    ]
}

fn dependency() -> impl Strategy<Value = DependencyEdge> {
    (
        ident(),
        prop_oneof![
            Just(DependencyKind::SameType),
            Just(DependencyKind::SameShape),
            (0usize..3, 0usize..3).prop_map(|(a, b)| DependencyKind::BoundedByShape { axes: [a, b] }),
        ],
    )
        .prop_map(|(s, k)| DependencyEdge::new(s, k))
}

fn scalar_value() -> impl Strategy<Value = EncodedValue> {
    prop_oneof![
        any::<i32>().prop_map(|i| EncodedValue::Int(i.into())),
        (-1000i32..1000).prop_map(|i| EncodedValue::Float(f64::from(i) / 4.0)),
        any::<bool>().prop_map(EncodedValue::Bool),
        "[a-z]{0,6}".prop_map(EncodedValue::Str),
        Just(EncodedValue::Null),
        ("[A-Z_]{1,6}", -5i64..50).prop_map(|(name, value)| EncodedValue::Enum { name, value }),
    ]
}

fn param() -> impl Strategy<Value = ParamInfo> {
    (
        ident(),
        any::<bool>(),
        prop::option::of(scalar_value()),
        prop::collection::vec(scalar_type(), 0..4),
        prop::option::of(prop::collection::vec(dim(), 0..4)),
        "[ -~]{0,40}",
        prop::option::of((-100i32..100, 1i32..100)),
        prop::option::of(prop::collection::vec(scalar_value(), 0..4)),
        prop::collection::vec(dependency(), 0..3),
    )
        .prop_map(
            |(name, flag, default, types, dims, raw_text, range, options, depends_on)| ParamInfo {
                name,
                flag,
                default,
                type_domain: TypeDomain::new(types),
                size_spec: dims.map(SizeSpec::new),
                description: DescriptionSpec {
                    raw_text,
                    value_range: range.map(|(lo, w)| ValueRange::new(f64::from(lo), f64::from(lo + w))),
                    options,
                    depends_on,
                },
            },
        )
}

fn api_info() -> impl Strategy<Value = StandardizedApiInfo> {
    (
        ident(),
        prop::collection::vec(param(), 0..5),
        0usize..4,
        prop::sample::select(vec![Provenance::Parsed, Provenance::Enriched]),
    )
        .prop_map(|(api_name, params, output_count, provenance)| StandardizedApiInfo {
            api_name,
            params,
            output_count,
            provenance,
        })
}

/// A signature line with distinct required and optional names.
fn signature_line() -> impl Strategy<Value = String> {
    (
        "[a-z][a-zA-Z0-9]{0,8}",
        prop::collection::btree_set("[a-z][a-z0-9]{0,5}", 0..6),
        0usize..3,
        prop::collection::vec("[a-z][a-z0-9]{0,5}", 1..3),
    )
        .prop_map(|(name, params, n_opt, outs)| {
            let params: Vec<String> = params.into_iter().collect();
            let split = params.len().saturating_sub(n_opt);
            let (req, opt) = params.split_at(split);
            let mut line = format!("{name}({}", req.join(", "));
            for (i, o) in opt.iter().enumerate() {
                if i == 0 && req.is_empty() {
                    line.push_str(&format!("[{o}"));
                } else {
                    line.push_str(&format!("[, {o}"));
                }
            }
            line.push_str(&"]".repeat(opt.len()));
            let mut outs = outs;
            outs.dedup();
            line.push_str(&format!(") -> {}", outs.join(", ")));
            line
        })
}

fn outcome() -> impl Strategy<Value = Outcome> {
    prop_oneof![
        (prop::bool::ANY, 0u64..100).prop_map(|(nan, d)| Outcome::Ok {
            outputs: if nan {
                vec![EncodedValue::Float(f64::NAN)]
            } else {
                vec![EncodedValue::Int(1)]
            },
            nan_detected: nan,
            duration_ms: d,
        }),
        (
            prop::sample::select(vec![
                "TypeError",
                "ValueError",
                "OverflowError",
                "error",
                "RuntimeError"
            ]),
            "[ -~]{0,60}"
        )
            .prop_map(|(t, m)| Outcome::Exception {
                type_name: t.to_string(),
                message: m
            }),
        Just(Outcome::Timeout),
        (prop::option::of(-3i32..200), prop::option::of(1i32..32))
            .prop_map(|(exit_code, signal)| Outcome::WorkerDeath { exit_code, signal }),
        (0u64..u64::MAX / 2).prop_map(|rss_bytes| Outcome::RssExceeded { rss_bytes }),
    ]
}

fn mode() -> impl Strategy<Value = ValidityMode> {
    prop::sample::select(vec![ValidityMode::ValidOnly, ValidityMode::Adversarial])
}

fn flags() -> impl Strategy<Value = StrategyFlags> {
    prop::collection::vec(any::<bool>(), 5).prop_map(|b| StrategyFlags {
        type_: b[0],
        size: b[1],
        value_noise: b[2],
        value_mask: b[3],
        value_division: b[4],
    })
}

fn allowlist() -> Vec<String> {
    vec!["TypeError".into(), "ValueError".into(), "OverflowError".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_round_matches_std_bitwise(
        v in prop_oneof![
            any::<f64>(),
            (-1e6f64..1e6).prop_map(|x| x.trunc() + 0.5),
            (-1e6f64..1e6).prop_map(|x| (x.trunc() + 0.5).next_down()),
            (-3.0f64..3.0),
        ]
    ) {
        let (a, b) = (round_half_away(v), v.round());
        prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{v}: {a} vs {b}");
    }

    #[test]
    fn schema_json_round_trip(info in api_info()) {
        let text = schema::to_json(&info);
        prop_assert_eq!(schema::from_json(&text).unwrap(), info.clone());
        let list = schema::list_to_json(std::slice::from_ref(&info));
        prop_assert_eq!(schema::list_from_json(&list).unwrap(), vec![info]);
    }

    #[test]
    fn validation_is_total(info in api_info()) {
        let _ = schema::validate(&info);
    }

    #[test]
    fn signature_render_is_idempotent(line in signature_line()) {
        let sig = parse_signature(&line).unwrap();
        let rendered = sig.to_string();
        let again = parse_signature(&rendered).unwrap();
        prop_assert_eq!(&again, &sig);
        prop_assert_eq!(again.to_string(), rendered);
    }

    #[test]
    fn optional_buffers_become_outputs(line in signature_line()) {
        let sig = parse_signature(&line).unwrap();
        for o in &sig.optional_buffer_params {
            prop_assert!(sig.outputs.contains(o));
            prop_assert!(!sig.inputs.contains(o));
        }
    }

    #[test]
    fn classes_partition_every_doc(body in "[ -~\n]{0,200}", path in ident()) {
        let doc = RawApiDoc { api_path: path, body };
        let parsed = parse_doc(&doc);
        prop_assert_eq!(parsed.class, classify_doc(&doc));
        if parsed.class == DocClass::Undocumented {
            prop_assert!(parsed.signature.is_none());
            prop_assert!(parsed.params.is_empty());
        }
        if parsed.class == DocClass::PoorlyDocumented {
            prop_assert!(parsed.signature.is_some());
            prop_assert!(parsed.params.is_empty());
        }
        if parsed.class != DocClass::Undocumented {
            prop_assert_eq!(parsed.signature.is_none(), parsed.error.is_some());
        }
    }

    #[test]
    fn param_blocks_keep_their_order(
        line in signature_line(),
        texts in prop::collection::vec(("[a-z][a-z0-9]{0,5}", "[a-zA-Z ,]{1,30}"), 1..6),
    ) {
        let mut body = format!("{line}\n.   @brief Something.\n.   \n");
        for (n, t) in &texts {
            body.push_str(&format!(".   @param {n} {}\n", t.trim()));
        }
        let got = parse_param_descriptions(&body);
        let names: Vec<&str> = got.iter().map(|d| d.name.as_str()).collect();
        let want: Vec<&str> = texts.iter().map(|(n, _)| n.as_str()).collect();
        prop_assert_eq!(names, want);
        let doc = RawApiDoc { api_path: "m.f".into(), body };
        prop_assert_eq!(parse_doc(&doc).class, DocClass::WellDocumented);
    }

    #[test]
    fn oracle_is_total_and_crashes_always_count(o in outcome(), m in mode()) {
        let v = classify_outcome(&o, m, &allowlist());
        let sig = dedup_signature(&ExecutionResult { case_index: 0, outcome: o.clone() });
        prop_assert!(!sig.is_empty());
        if o.kills_worker() {
            prop_assert_eq!(v, Verdict::CrashBug);
        }
        // the signature depends on the outcome alone, never on the verdict
        match &o {
            Outcome::Ok { nan_detected: false, .. } => prop_assert_eq!(&sig, "ok"),
            Outcome::Ok { nan_detected: true, .. } => prop_assert!(sig.starts_with("nan:"), "{}", sig),
            _ => prop_assert!(sig != "ok" && !sig.starts_with("nan:"), "{}", sig),
        }
        if let Outcome::Exception { type_name, .. } = &o {
            match m {
                ValidityMode::ValidOnly => prop_assert_eq!(v, Verdict::ExceptionBug),
                ValidityMode::Adversarial if allowlist().contains(type_name) => prop_assert_eq!(v, Verdict::Pass),
                ValidityMode::Adversarial => prop_assert!(matches!(v, Verdict::Pass | Verdict::ExceptionBug)),
            }
        }
    }

    #[test]
    fn signature_ignores_numbers_and_addresses(
        prefix in "[a-zA-Z :()']{0,20}",
        a in any::<u32>(), b in any::<u32>(), x in any::<u64>(), y in any::<u64>(),
        tail in "[a-z \n]{0,20}",
    ) {
        let msg = |n: u32, p: u64| format!("{prefix} code {n} at {p:#x}\n{tail}");
        let sig = |m: String| dedup_signature(&ExecutionResult {
            case_index: 0,
            outcome: Outcome::Exception { type_name: "error".into(), message: m },
        });
        prop_assert_eq!(sig(msg(a, x)), sig(msg(b, y)));
    }

    #[test]
    fn parallel_parse_matches_sequential(bodies in prop::collection::vec("[ -~\n]{0,80}", 0..20)) {
        let docs: Vec<RawApiDoc> = bodies.into_iter().enumerate()
            .map(|(i, body)| RawApiDoc { api_path: format!("m.f{i}"), body }).collect();
        prop_assert_eq!(parse_corpus(&docs, Parallelism::Parallel), parse_corpus(&docs, Parallelism::Sequential));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn streams_are_deterministic_and_prefix_stable(seed in any::<u64>(), api in 0usize..22, short in 1usize..40) {
        let cs = &MOCK[api];
        let cfg = |budget| GenConfig { budget_per_api: budget, rng_seed: seed, ..GenConfig::default() };
        let (c_short, c_long) = (cfg(short), cfg(short + 40));
        let a: Vec<_> = case_stream(cs, &c_short).collect();
        let b: Vec<_> = case_stream(cs, &c_long).collect();
        let again: Vec<_> = case_stream(cs, &c_long).collect();
        prop_assert_eq!(a.len(), short);
        prop_assert_eq!(&b[..short], &a[..]);
        prop_assert_eq!(b, again);
    }

    #[test]
    fn valid_cases_satisfy_every_constraint(seed in any::<u64>(), f in flags()) {
        let cfg = GenConfig { budget_per_api: 60, rng_seed: seed, strategy_flags: f, ..GenConfig::default() };
        for cs in MOCK.iter() {
            for case in case_stream(cs, &cfg) {
                if case.validity_mode == ValidityMode::ValidOnly {
                    let v = check_case(cs, &case);
                    prop_assert!(v.is_empty(), "{} case {}: {:?}", cs.api_name, case.case_index, v);
                }
            }
        }
    }

    #[test]
    fn disabled_strategies_are_never_applied(seed in any::<u64>(), f in flags()) {
        let cfg = GenConfig { budget_per_api: 60, rng_seed: seed, strategy_flags: f, ..GenConfig::default() };
        for cs in MOCK.iter() {
            for case in case_stream(cs, &cfg) {
                let a = case.applied;
                if !f.type_ {
                    prop_assert!(a.type_strategy.is_none());
                }
                if !f.size {
                    prop_assert!(a.size_strategy.is_none());
                }
                match a.value_strategy {
                    Some(ValueStrategy::Noise) => prop_assert!(f.value_noise),
                    Some(ValueStrategy::Mask) => prop_assert!(f.value_mask),
                    Some(ValueStrategy::Division) => prop_assert!(f.value_division),
                    None => {}
                }
                if case.validity_mode == ValidityMode::ValidOnly {
                    prop_assert_ne!(a.type_strategy, Some(TypeStrategy::Invalid));
                }
            }
        }
    }
}
