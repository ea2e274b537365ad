use docfuzz_core::bundled;
use docfuzz_core::doc_parser::{parse_doc, parse_signature};
use docfuzz_core::enrichment::*;
use docfuzz_core::par::Parallelism;
use docfuzz_core::schema::*;
use docfuzz_core::value::*;

fn listing_infos() -> Vec<StandardizedApiInfo> {
    let parsed: Vec<_> = bundled::listing_docs().iter().map(parse_doc).collect();
    standardize_all(
        &parsed,
        &[],
        &EnrichmentBackend::CorpusInference,
        Parallelism::Sequential,
    )
    .0
}

#[test]
fn rotation_matrix_params() {
    let infos = listing_infos();
    let rot = &infos[0];
    assert_eq!(rot.api_name, "getRotationMatrix2D");
    let names: Vec<_> = rot.params.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["center", "angle", "scale"]);
    assert_eq!(rot.output_count, 1);
    assert_eq!(rot.provenance, Provenance::Parsed);
}

#[test]
fn back_project_scale_inherits_rotation_scale() {
    let infos = listing_infos();
    let back = infos.iter().find(|i| i.api_name == "calcBackProject").unwrap();
    let rot_scale = infos[0].param("scale").unwrap();
    let scale = back.param("scale").unwrap();
    assert_eq!(scale.description.raw_text, "Isotropic scale factor.");
    assert_eq!(scale.type_domain, rot_scale.type_domain);
    assert_eq!(back.provenance, Provenance::Enriched);
    assert_eq!(back.output_count, 1);
    let images = back.param("images").unwrap();
    assert_eq!(images.type_domain.as_slice(), [ScalarType::Float32]);
    assert!(images.size_spec.is_none() && images.flag);
}

#[test]
fn empty_descriptions_leave_params_unconstrained() {
    let sig = parse_signature("f(a, b) -> c").unwrap();
    let info = standardize_well_documented(&sig, &[]);
    assert!(info.params.iter().all(|p| *p == ParamInfo::unconstrained(&p.name, "")));
    assert_eq!(info.provenance, Provenance::Parsed);
}

#[test]
fn empty_corpus_falls_back() {
    let sig = parse_signature("g(x, y[, z]) -> z").unwrap();
    let info = enrich_poorly_documented(&sig, &ParamCorpus::default(), &EnrichmentBackend::CorpusInference);
    assert!(info.params.iter().all(|p| *p == fallback_param(&p.name)));
    assert!(validate(&info).is_empty());
}

#[test]
fn bundled_corpus_validates() {
    let parsed: Vec<_> = bundled::mock_docs().iter().map(parse_doc).collect();
    let (infos, summary) = standardize_all(&parsed, &[], &EnrichmentBackend::CorpusInference, Parallelism::Parallel);
    assert_eq!(summary.undocumented, 1);
    assert_eq!(infos.len(), 22);
    for info in &infos {
        assert_eq!(validate(info), vec![], "{}", info.api_name);
    }
}
