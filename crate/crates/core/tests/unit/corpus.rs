use docfuzz_core::enrichment::corpus::*;
use docfuzz_core::schema::*;
use docfuzz_core::schema::{DependencyEdge, TypeDomain};
use docfuzz_core::value::ScalarType;

fn info(api: &str, params: Vec<ParamInfo>) -> StandardizedApiInfo {
    StandardizedApiInfo {
        api_name: api.into(),
        params,
        output_count: 1,
        provenance: Provenance::Parsed,
    }
}

fn typed(name: &str, t: ScalarType) -> ParamInfo {
    ParamInfo {
        type_domain: TypeDomain::new([t]),
        ..ParamInfo::unconstrained(name, "")
    }
}

#[test]
fn empty_corpus() {
    let c = build_param_corpus(&[]);
    assert!(c.is_empty());
    assert!(c.lookup("scale").is_none());
}

#[test]
fn multimap_and_key_collapse() {
    let c = build_param_corpus(&[
        info(
            "b",
            vec![typed("scale", ScalarType::Float32), typed("image1", ScalarType::Uint8)],
        ),
        info(
            "a",
            vec![typed("scale", ScalarType::Float64), typed("image2", ScalarType::Uint8)],
        ),
    ]);
    assert_eq!(c.get("scale").len(), 2);
    assert_eq!(c.get("image").len(), 2);
    assert!(c.get("image1").is_empty());
    assert_eq!(c.get("scale")[0].source_api, "a");
}

#[test]
fn most_frequent_then_smallest_source() {
    let c = build_param_corpus(&[
        info("z", vec![typed("alpha", ScalarType::Float64)]),
        info("m", vec![typed("alpha", ScalarType::Float64)]),
        info("a", vec![typed("alpha", ScalarType::Float32)]),
    ]);
    let hit = c.lookup("alpha").unwrap();
    assert_eq!(hit.source_api, "m");
    let tie = build_param_corpus(&[
        info("zeta", vec![typed("beta", ScalarType::Float64)]),
        info("eta", vec![typed("beta", ScalarType::Float32)]),
    ]);
    assert_eq!(tie.lookup("beta").unwrap().source_api, "eta");
}

#[test]
fn exact_name_beats_normalized() {
    let c = build_param_corpus(&[
        info("a", vec![typed("src", ScalarType::Float32)]),
        info("b", vec![typed("src", ScalarType::Float32)]),
        info("c", vec![typed("src2", ScalarType::Uint8)]),
    ]);
    assert_eq!(c.lookup("src2").unwrap().source_api, "c");
    assert_eq!(
        c.lookup("src3").unwrap().info.type_domain.as_slice(),
        [ScalarType::Float32]
    );
}

#[test]
fn remap_drops_missing_targets() {
    let mut p = typed("src2", ScalarType::Uint8);
    p.description.depends_on = vec![DependencyEdge::new("src1", DependencyKind::SameType)];
    let e = CorpusEntry {
        info: p,
        source_api: "x".into(),
    };
    assert!(remap(&e, "other", &[]).description.depends_on.is_empty());
    let src1 = typed("src1", ScalarType::Float64);
    let kept = remap(&e, "src2", &[src1]);
    assert_eq!(kept.description.depends_on.len(), 1);
    assert_eq!(kept.type_domain.as_slice(), [ScalarType::Float64]);
}
